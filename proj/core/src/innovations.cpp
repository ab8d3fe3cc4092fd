#include "unitmark/innovations.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "unitmark/errors.hpp"
#include "unitmark/fft.hpp"

namespace unitmark {

namespace {

// Internal seed for calibration randomness (Kesten bisection, stationarity
// check). Fixed so results are identical across runs and thread counts.
constexpr std::uint64_t kCalibrationSeed = 0x756e69746d61726bULL; // "unitmark"

double slowly_varying_at(SlowlyVarying l, double x) {
    switch (l) {
        case SlowlyVarying::One: return 1.0;
        case SlowlyVarying::LogPlus: return std::log1p(x);
    }
    return 1.0;
}

} // namespace

std::string to_string(Family f) {
    switch (f) {
        case Family::StableIID: return "stable_iid";
        case Family::Garch11: return "garch11";
        case Family::LinearMA: return "linear_ma";
    }
    return "?";
}

std::string to_string(SlowlyVarying l) {
    return l == SlowlyVarying::One ? "one" : "log";
}

std::string to_string(NoiseLaw n) {
    switch (n) {
        case NoiseLaw::Normal: return "normal";
        case NoiseLaw::StudentT: return "student_t";
        case NoiseLaw::TwoPoint: return "two_point";
    }
    return "?";
}

void InnovationSpec::validate() const {
    if (burn_in < 0) throw ConfigError("burn_in must be >= 0");
    if (truncation < 0) throw ConfigError("truncation must be >= 1 (or 0 for auto)");
    switch (family) {
        case Family::StableIID:
            if (!(alpha > 0.0 && alpha <= 2.0))
                throw ConfigError("alpha must lie in (0, 2] for stable_iid");
            if (!(skew >= -1.0 && skew <= 1.0))
                throw ConfigError("skew must lie in [-1, 1]");
            break;
        case Family::Garch11:
            if (!(omega > 0.0)) throw ConfigError("omega must be > 0 for garch11");
            if (a < 0.0 || b < 0.0) throw ConfigError("garch coefficients a, b must be >= 0");
            break;
        case Family::LinearMA:
            if (!(theta > 0.5)) throw ConfigError("theta must be > 1/2 for linear_ma");
            break;
    }
    if (noise == NoiseLaw::StudentT && !(noise_df > 0.0))
        throw ConfigError("noise_df must be > 0");
}

double base_noise_draw(const InnovationSpec& spec, RandomStream& rs) {
    switch (spec.noise) {
        case NoiseLaw::Normal: return rs.next_normal();
        case NoiseLaw::StudentT: return rs.next_student_t(spec.noise_df);
        case NoiseLaw::TwoPoint: return rs.next_two_point();
    }
    return 0.0;
}

double noise_sd(NoiseLaw law, double df) {
    switch (law) {
        case NoiseLaw::Normal: return 1.0;
        case NoiseLaw::TwoPoint: return 1.0;
        case NoiseLaw::StudentT:
            if (df <= 2.0)
                throw NumericalError("Student-t noise with df <= 2 has infinite variance");
            return std::sqrt(df / (df - 2.0));
    }
    return 1.0;
}

std::vector<double> sample_stable_iid(double alpha, double skew, std::size_t n,
                                      RandomStream& rs) {
    if (!(alpha > 0.0 && alpha <= 2.0)) throw ConfigError("alpha must lie in (0, 2]");
    if (!(skew >= -1.0 && skew <= 1.0)) throw ConfigError("skew must lie in [-1, 1]");
    if (n < 1) throw ConfigError("n must be >= 1");
    std::vector<double> out(n);
    for (auto& v : out) v = stable_draw(alpha, skew, rs);
    return out;
}

std::vector<double> sample_stable_iid(double alpha, double skew, std::size_t n,
                                      NoiseStream stream) {
    RandomStream rs(stream);
    return sample_stable_iid(alpha, skew, n, rs);
}

InnovationSample sample_garch(const InnovationSpec& spec, std::size_t n,
                              RandomStream& rs) {
    spec.validate();
    InnovationSample out;

    // Stationarity check E log(a + b eta^2) < 0, Monte Carlo on a fixed
    // calibration stream. Violation is a warning, not an error.
    {
        RandomStream calib(kCalibrationSeed, 1);
        const std::size_t m = 100000;
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double eta = base_noise_draw(spec, calib);
            acc += std::log(spec.a + spec.b * eta * eta);
        }
        out.stationarity_warning = (acc / static_cast<double>(m) >= 0.0);
    }

    const double ab = spec.a + spec.b;
    double sigma2 = ab < 1.0 ? spec.omega / (1.0 - ab) : spec.omega;
    double prev_eps = 0.0;
    bool first = true;
    out.eps.resize(n);
    const long total = spec.burn_in + static_cast<long>(n);
    for (long i = 0; i < total; ++i) {
        if (!first) {
            sigma2 = spec.omega + spec.a * sigma2 + spec.b * prev_eps * prev_eps;
        }
        first = false;
        const double eta = base_noise_draw(spec, rs);
        prev_eps = std::sqrt(sigma2) * eta;
        if (i >= spec.burn_in) out.eps[static_cast<std::size_t>(i - spec.burn_in)] = prev_eps;
    }
    return out;
}

InnovationSample sample_garch(const InnovationSpec& spec, std::size_t n,
                              NoiseStream stream) {
    RandomStream rs(stream);
    return sample_garch(spec, n, rs);
}

double ma_coefficient(const InnovationSpec& spec, long j) {
    return std::pow(static_cast<double>(j), -spec.theta) *
           slowly_varying_at(spec.slowly_varying, static_cast<double>(j));
}

long effective_truncation(const InnovationSpec& spec, std::size_t n) {
    if (spec.truncation > 0) return spec.truncation;
    return std::max<long>(static_cast<long>(n), 1000);
}

double ma_tail_mass(const InnovationSpec& spec, long M) {
    // sum_{j>M} c_j^2 with 2*theta > 1; direct summation until the terms are
    // negligible relative to the accumulated mass.
    double total = 0.0;
    const long cap = 20000000;
    for (long j = M + 1; j <= M + cap; ++j) {
        const double c = ma_coefficient(spec, j);
        const double t = c * c;
        total += t;
        if (t < 1e-18 * (total + 1e-300) && j > M + 16) break;
    }
    return total;
}

InnovationSample sample_linear_ma(const InnovationSpec& spec, std::size_t n,
                                  RandomStream& rs) {
    spec.validate();
    const long M = effective_truncation(spec, n);
    InnovationSample out;
    out.truncation_tail_mass = ma_tail_mass(spec, M);

    // Base draws eta_{1-M}, ..., eta_{n-1}: n + M values, oldest first.
    const std::size_t base_len = n + static_cast<std::size_t>(M);
    std::vector<double> eta(base_len);
    for (auto& v : eta) v = base_noise_draw(spec, rs);

    std::vector<double> c(static_cast<std::size_t>(M) + 1, 0.0);
    for (long j = 1; j <= M; ++j) c[static_cast<std::size_t>(j)] = ma_coefficient(spec, j);

    out.eps.assign(n, 0.0);
    // eps_i = sum_j c_j eta_{i-j}; eta index i-j maps to eta[(i-j) + M - 1].
    const bool small = static_cast<double>(n) * static_cast<double>(M) <= (1 << 22);
    if (small) {
        for (std::size_t i = 1; i <= n; ++i) {
            double acc = 0.0;
            for (long j = 1; j <= M; ++j) {
                acc += c[static_cast<std::size_t>(j)] *
                       eta[i - static_cast<std::size_t>(j) + static_cast<std::size_t>(M) - 1];
            }
            out.eps[i - 1] = acc;
        }
    } else {
        const auto full = fft::convolve(eta, c);
        // full[t] = sum_j c[j] eta[t - j]; eps_i = full[i + M - 1].
        for (std::size_t i = 1; i <= n; ++i) {
            out.eps[i - 1] = full[i + static_cast<std::size_t>(M) - 1];
        }
    }
    return out;
}

InnovationSample sample_linear_ma(const InnovationSpec& spec, std::size_t n,
                                  NoiseStream stream) {
    RandomStream rs(stream);
    return sample_linear_ma(spec, n, rs);
}

InnovationSample sample_innovations(const InnovationSpec& spec, std::size_t n,
                                    RandomStream& rs) {
    spec.validate();
    switch (spec.family) {
        case Family::StableIID: {
            InnovationSample out;
            out.eps = sample_stable_iid(spec.alpha, spec.skew, n, rs);
            return out;
        }
        case Family::Garch11: return sample_garch(spec, n, rs);
        case Family::LinearMA: return sample_linear_ma(spec, n, rs);
    }
    throw ConfigError("unknown family");
}

InnovationSample sample_innovations(const InnovationSpec& spec, std::size_t n,
                                    NoiseStream stream) {
    RandomStream rs(stream);
    return sample_innovations(spec, n, rs);
}

double kesten_index(const InnovationSpec& spec) {
    if (spec.family != Family::Garch11)
        throw ConfigError("kesten_index requires a garch11 spec");
    spec.validate();

    static std::mutex mutex;
    static std::map<std::tuple<double, double, int, double>, double> cache;
    const auto key = std::make_tuple(spec.a, spec.b, static_cast<int>(spec.noise),
                                     spec.noise == NoiseLaw::StudentT ? spec.noise_df : 0.0);
    {
        std::lock_guard<std::mutex> lock(mutex);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }

    // Shared draws of a + b eta^2 for every moment evaluation keep the
    // bisection monotone in s.
    const std::size_t m = 1000000;
    std::vector<double> base(m);
    {
        RandomStream rs(kCalibrationSeed, 2);
        for (auto& v : base) {
            const double eta = base_noise_draw(spec, rs);
            v = spec.a + spec.b * eta * eta;
        }
    }
    auto moment = [&](double s) {
        double acc = 0.0;
        const double half = 0.5 * s;
        for (const double v : base) acc += std::pow(v, half);
        return acc / static_cast<double>(m);
    };

    double mean_log = 0.0;
    for (const double v : base) mean_log += std::log(v);
    mean_log /= static_cast<double>(m);
    if (mean_log >= 0.0)
        throw NumericalError("kesten_index: E log(a + b eta^2) >= 0, no positive root");

    double lo = 1e-6;
    double hi = 1.0;
    while (moment(hi) < 1.0) {
        hi *= 2.0;
        if (hi > 512.0)
            throw NumericalError("kesten_index: moment equation has no root below 512");
    }
    while (hi - lo > 1e-3) {
        const double mid = 0.5 * (lo + hi);
        (moment(mid) < 1.0 ? lo : hi) = mid;
    }
    const double root = 0.5 * (lo + hi);
    {
        std::lock_guard<std::mutex> lock(mutex);
        cache[key] = root;
    }
    return root;
}

bool is_long_memory(const InnovationSpec& spec) {
    return spec.family == Family::LinearMA && spec.theta < 1.0;
}

bool is_infinite_variance(const InnovationSpec& spec) {
    switch (spec.family) {
        case Family::StableIID: return spec.alpha < 2.0;
        case Family::Garch11: return kesten_index(spec) < 2.0;
        case Family::LinearMA: return false;
    }
    return false;
}

double normalizer_a_n(const InnovationSpec& spec, std::size_t n) {
    if (n < 1) throw ConfigError("n must be >= 1");
    const double nn = static_cast<double>(n);
    auto heavy_tail_rate = [&](double alpha) {
        if (alpha < 2.0) return std::pow(nn, 1.0 / alpha);
        if (alpha == 2.0) return std::sqrt(nn * std::log(std::max(nn, 2.0)));
        return std::sqrt(nn);
    };
    switch (spec.family) {
        case Family::StableIID:
            return heavy_tail_rate(spec.alpha);
        case Family::Garch11: {
            const double kappa = kesten_index(spec);
            // The bisection cannot resolve kappa == 2 exactly; snap within
            // its own tolerance.
            if (std::abs(kappa - 2.0) <= 1e-3) return heavy_tail_rate(2.0);
            return heavy_tail_rate(kappa);
        }
        case Family::LinearMA:
            if (spec.theta < 1.0) {
                return std::pow(nn, 1.5 - spec.theta) *
                       slowly_varying_at(spec.slowly_varying, nn);
            }
            return std::sqrt(nn);
    }
    throw ConfigError("unknown family");
}

double ma_marginal_sd(const InnovationSpec& spec, std::size_t n) {
    if (spec.family != Family::LinearMA)
        throw NumericalError("closed-form marginal sd only available for linear_ma");
    const long M = effective_truncation(spec, n);
    double mass = 0.0;
    for (long j = 1; j <= M; ++j) {
        const double c = ma_coefficient(spec, j);
        mass += c * c;
    }
    return std::sqrt(mass) * noise_sd(spec.noise, spec.noise_df);
}

} // namespace unitmark
