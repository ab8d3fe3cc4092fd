#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace unitmark {

/// Runs fn(i) for i in [begin, end) on up to `threads` workers. Work items
/// must write only to their own slots; the schedule carries no information,
/// so results are identical for any thread count.
inline void parallel_for(long begin, long end, int threads,
                         const std::function<void(long)>& fn) {
    const long total = end - begin;
    if (total <= 0) return;
    if (threads <= 1 || total == 1) {
        for (long i = begin; i < end; ++i) fn(i);
        return;
    }
    const int workers = static_cast<int>(
        std::min<long>(threads, total));
    std::atomic<long> next{begin};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto body = [&] {
        for (;;) {
            const long i = next.fetch_add(1);
            if (i >= end || failed.load(std::memory_order_relaxed)) return;
            try {
                fn(i);
            } catch (...) {
                {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
                failed.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

/// Default worker count for CLI and tests: hardware concurrency, at least 1.
inline int default_threads() {
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

} // namespace unitmark
