#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace unitmark {

/// Identifies one logical random stream. Identical (seed, stream_id) pairs
/// reproduce identical output bit-for-bit; distinct stream_ids give
/// statistically independent streams regardless of thread scheduling.
struct NoiseStream {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
};

namespace detail {

// Philox-4x64, 10 rounds (Salmon et al.). Counter-based: the output block is
// a pure function of (key, counter), which is what makes replicate-indexed
// streams reproducible under any scheduling.
struct Philox4x64 {
    static constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
    static constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
    static constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
    static constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

    std::array<std::uint64_t, 2> key{};
    std::array<std::uint64_t, 4> counter{};

    static void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi,
                        std::uint64_t& lo) {
        const unsigned __int128 p =
            static_cast<unsigned __int128>(a) * static_cast<unsigned __int128>(b);
        hi = static_cast<std::uint64_t>(p >> 64);
        lo = static_cast<std::uint64_t>(p);
    }

    static std::array<std::uint64_t, 4> block(std::array<std::uint64_t, 4> ctr,
                                              std::array<std::uint64_t, 2> k) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                k[0] += kWeyl0;
                k[1] += kWeyl1;
            }
            std::uint64_t hi0, lo0, hi1, lo1;
            mulhilo(kMul0, ctr[0], hi0, lo0);
            mulhilo(kMul1, ctr[2], hi1, lo1);
            ctr = {hi1 ^ ctr[1] ^ k[0], lo1, hi0 ^ ctr[3] ^ k[1], lo0};
        }
        return ctr;
    }

    std::array<std::uint64_t, 4> next_block() {
        const auto out = block(counter, key);
        // 256-bit little-endian increment.
        for (int w = 0; w < 4; ++w) {
            if (++counter[w] != 0) break;
        }
        return out;
    }
};

} // namespace detail

/// Buffered generator over one Philox stream. Draws are consumed
/// sequentially; the object is cheap to construct and copy.
class RandomStream {
public:
    explicit RandomStream(NoiseStream s) {
        engine_.key = {s.seed, s.stream_id};
    }
    RandomStream(std::uint64_t seed, std::uint64_t stream_id)
        : RandomStream(NoiseStream{seed, stream_id}) {}

    std::uint64_t next_u64() {
        if (pos_ == 4) {
            buffer_ = engine_.next_block();
            pos_ = 0;
        }
        return buffer_[pos_++];
    }

    /// Uniform on the open interval (0, 1); never returns an exact endpoint.
    double next_unit() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
    }

    /// Standard normal via Box-Muller (second variate cached).
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(next_unit()));
        const double a = 6.283185307179586476925286766559 * next_unit();
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// Exponential with unit rate.
    double next_exponential() { return -std::log(next_unit()); }

    /// Rademacher +-1.
    double next_two_point() { return next_unit() < 0.5 ? -1.0 : 1.0; }

    /// Student-t with df degrees of freedom (Bailey's polar method).
    double next_student_t(double df) {
        for (;;) {
            const double u = 2.0 * next_unit() - 1.0;
            const double v = 2.0 * next_unit() - 1.0;
            const double w = u * u + v * v;
            if (w > 0.0 && w < 1.0) {
                return u * std::sqrt(df * (std::pow(w, -2.0 / df) - 1.0) / w);
            }
        }
    }

private:
    detail::Philox4x64 engine_;
    std::array<std::uint64_t, 4> buffer_{};
    int pos_ = 4;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// One draw from the standard stable law S(alpha, skew) in the S1
/// parametrization (Chambers-Mallows-Stuck). alpha = 2 is N(0, 2).
double stable_draw(double alpha, double skew, RandomStream& rs);

} // namespace unitmark
