#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "unitmark/errors.hpp"
#include "unitmark/innovations.hpp"

using namespace unitmark;

namespace {

double sample_mean(const std::vector<double>& v) {
    double acc = 0;
    for (double x : v) acc += x;
    return acc / static_cast<double>(v.size());
}

double sample_var(const std::vector<double>& v) {
    const double m = sample_mean(v);
    double acc = 0;
    for (double x : v) acc += (x - m) * (x - m);
    return acc / static_cast<double>(v.size() - 1);
}

InnovationSpec garch_spec(double omega, double a, double b) {
    InnovationSpec s;
    s.family = Family::Garch11;
    s.omega = omega;
    s.a = a;
    s.b = b;
    s.noise = NoiseLaw::Normal;
    return s;
}

InnovationSpec ma_spec(double theta, long M) {
    InnovationSpec s;
    s.family = Family::LinearMA;
    s.theta = theta;
    s.truncation = M;
    s.noise = NoiseLaw::Normal;
    return s;
}

// Hill tail-index estimator on the top k order statistics.
double hill_estimate(std::vector<double> v, std::size_t k) {
    for (auto& x : v) x = std::abs(x);
    std::sort(v.begin(), v.end(), std::greater<double>());
    double acc = 0;
    for (std::size_t i = 0; i < k; ++i) acc += std::log(v[i] / v[k]);
    return static_cast<double>(k) / acc;
}

} // namespace

TEST_CASE("stable sampler basics") {
    SUBCASE("alpha=2 is N(0,2)") {
        const auto v = sample_stable_iid(2.0, 0.0, 100000, NoiseStream{11, 0});
        CHECK(sample_var(v) == doctest::Approx(2.0).epsilon(0.05));
        CHECK(std::abs(sample_mean(v)) < 0.02);
    }
    SUBCASE("alpha=1.5 symmetric: median near zero") {
        auto v = sample_stable_iid(1.5, 0.0, 100000, NoiseStream{12, 0});
        std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
        CHECK(std::abs(v[v.size() / 2]) < 0.02);
    }
    SUBCASE("tail ratio follows the regular-variation index") {
        // Counting oracle: P(|e| > 2t)/P(|e| > t) ~ 2^{-alpha} at large t.
        const double alpha = 1.2;
        const auto v = sample_stable_iid(alpha, 0.0, 1000000, NoiseStream{13, 0});
        std::vector<double> av(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) av[i] = std::abs(v[i]);
        std::vector<double> sorted = av;
        std::sort(sorted.begin(), sorted.end());
        const double t = sorted[static_cast<std::size_t>(0.99 * sorted.size())];
        long over_t = 0, over_2t = 0;
        for (double x : av) {
            if (x > t) ++over_t;
            if (x > 2 * t) ++over_2t;
        }
        const double ratio = static_cast<double>(over_2t) / static_cast<double>(over_t);
        CHECK(ratio == doctest::Approx(std::pow(2.0, -alpha)).epsilon(0.15));
    }
    SUBCASE("parameter validation") {
        CHECK_THROWS_AS(sample_stable_iid(2.5, 0.0, 10, NoiseStream{1, 0}), ConfigError);
        CHECK_THROWS_AS(sample_stable_iid(1.5, 1.5, 10, NoiseStream{1, 0}), ConfigError);
    }
}

TEST_CASE("garch degenerates to scaled noise when a=b=0") {
    auto spec = garch_spec(0.25, 0.0, 0.0);
    spec.burn_in = 0;
    const auto got = sample_garch(spec, 500, NoiseStream{21, 0});
    // With a = b = 0 the recursion consumes the same eta draws.
    RandomStream rs(21, 0);
    for (std::size_t i = 0; i < got.eps.size(); ++i) {
        const double eta = rs.next_normal();
        CHECK(got.eps[i] == std::sqrt(0.25) * eta);
    }
    CHECK_FALSE(got.stationarity_warning);
}

TEST_CASE("garch stationarity warning when E log(a + b eta^2) >= 0") {
    auto spec = garch_spec(0.1, 1.2, 0.2);
    const auto got = sample_garch(spec, 100, NoiseStream{22, 0});
    CHECK(got.stationarity_warning);
}

TEST_CASE("kesten index solves the moment equation") {
    // Example parameters with a + b < 1: finite variance, index above 2.
    const auto spec = garch_spec(0.1, 0.4, 0.4);
    const double kappa = kesten_index(spec);
    CHECK(kappa > 2.0);

    // Bisection oracle cross-check: E (a + b eta^2)^{kappa/2} = 1 recomputed
    // with fresh draws.
    RandomStream rs(99, 7);
    double acc = 0;
    const std::size_t m = 400000;
    for (std::size_t i = 0; i < m; ++i) {
        const double eta = rs.next_normal();
        acc += std::pow(spec.a + spec.b * eta * eta, kappa / 2.0);
    }
    CHECK(acc / static_cast<double>(m) == doctest::Approx(1.0).epsilon(0.02));

    // Hill estimate of the realized tail index.
    const auto sample = sample_garch(spec, 1000000, NoiseStream{23, 0});
    const double hill = hill_estimate(sample.eps, 1000);
    CHECK(hill == doctest::Approx(kappa).epsilon(0.20));
}

TEST_CASE("garch burn-in does not move the marginal variance") {
    auto spec0 = garch_spec(0.1, 0.4, 0.4);
    spec0.burn_in = 0;
    auto spec1 = spec0;
    spec1.burn_in = 1000;
    const std::size_t n = 300000;
    const auto a = sample_garch(spec0, n, NoiseStream{24, 0});
    const auto b = sample_garch(spec1, n, NoiseStream{24, 1});
    // Late halves only, so spec0's start transient (none, by initialization
    // at the stationary variance) cannot matter.
    std::vector<double> la(a.eps.begin() + n / 2, a.eps.end());
    std::vector<double> lb(b.eps.begin() + n / 2, b.eps.end());
    CHECK(sample_var(la) == doctest::Approx(sample_var(lb)).epsilon(0.05));
}

TEST_CASE("linear MA single lag is a pure shift") {
    auto spec = ma_spec(1.7, 1); // c_1 = 1 exactly, everything else zero
    const std::size_t n = 300;
    const auto got = sample_linear_ma(spec, n, NoiseStream{31, 0});
    RandomStream rs(31, 0);
    std::vector<double> eta(n + 1);
    for (auto& v : eta) v = rs.next_normal();
    for (std::size_t i = 0; i < n; ++i) CHECK(got.eps[i] == eta[i]);
}

TEST_CASE("linear MA autocovariance matches the coefficient convolution") {
    auto spec = ma_spec(1.5, 200);
    const std::size_t n = 100000;
    const auto got = sample_linear_ma(spec, n, NoiseStream{32, 0});

    // Oracle: gamma_k = sum_j c_j c_{j+k} for Gaussian unit-variance noise.
    const long M = 200;
    std::vector<double> c(static_cast<std::size_t>(M) + 1);
    for (long j = 1; j <= M; ++j) c[static_cast<std::size_t>(j)] = ma_coefficient(spec, j);
    auto oracle_gamma = [&](long k) {
        double acc = 0;
        for (long j = 1; j + k <= M; ++j)
            acc += c[static_cast<std::size_t>(j)] * c[static_cast<std::size_t>(j + k)];
        return acc;
    };

    for (long k : {0L, 1L, 2L, 5L}) {
        double acc = 0;
        for (std::size_t i = 0; i + static_cast<std::size_t>(k) < n; ++i) {
            acc += got.eps[i] * got.eps[i + static_cast<std::size_t>(k)];
        }
        const double gamma_hat = acc / static_cast<double>(n - static_cast<std::size_t>(k));
        // Bartlett-type standard error from the oracle autocovariances.
        double var = 0;
        for (long h = -M; h <= M; ++h) {
            const double gh = h >= 0 ? oracle_gamma(h) : oracle_gamma(-h);
            const double ghk1 = std::abs(h + k) <= M ? oracle_gamma(std::abs(h + k)) : 0.0;
            const double ghk2 = std::abs(h - k) <= M ? oracle_gamma(std::abs(h - k)) : 0.0;
            var += gh * gh + ghk1 * ghk2;
        }
        const double se = std::sqrt(var / static_cast<double>(n));
        CHECK(std::abs(gamma_hat - oracle_gamma(k)) < 3.0 * se);
    }
}

TEST_CASE("long-memory partial sums scale like n^{3-2 theta}") {
    auto base = ma_spec(0.7, 0);
    const int reps = 600;
    std::vector<double> ratio;
    for (long n : {1024L, 4096L, 16384L}) {
        auto spec = base;
        spec.truncation = n; // M = n per the example
        std::vector<double> sums(reps);
        for (int r = 0; r < reps; ++r) {
            const auto s = sample_linear_ma(spec, static_cast<std::size_t>(n),
                                            NoiseStream{33, static_cast<std::uint64_t>(r)});
            double acc = 0;
            for (double e : s.eps) acc += e;
            sums[static_cast<std::size_t>(r)] = acc;
        }
        ratio.push_back(sample_var(sums) / std::pow(static_cast<double>(n), 1.6));
    }
    const double lo = *std::min_element(ratio.begin(), ratio.end());
    const double hi = *std::max_element(ratio.begin(), ratio.end());
    CHECK(hi / lo < 1.2);
}

TEST_CASE("FFT convolution path agrees with the direct loop") {
    auto spec = ma_spec(0.8, 3000);
    const std::size_t n = 3000; // n * M > 2^22 forces the FFT path
    const auto got = sample_linear_ma(spec, n, NoiseStream{34, 0});

    RandomStream rs(34, 0);
    const long M = 3000;
    std::vector<double> eta(n + static_cast<std::size_t>(M));
    for (auto& v : eta) v = rs.next_normal();
    std::vector<double> c(static_cast<std::size_t>(M) + 1);
    for (long j = 1; j <= M; ++j) c[static_cast<std::size_t>(j)] = ma_coefficient(spec, j);

    double max_abs = 0;
    for (double e : got.eps) max_abs = std::max(max_abs, std::abs(e));
    for (std::size_t i = 1; i <= n; ++i) {
        double acc = 0;
        for (long j = 1; j <= M; ++j) {
            acc += c[static_cast<std::size_t>(j)] *
                   eta[i - static_cast<std::size_t>(j) + static_cast<std::size_t>(M) - 1];
        }
        CHECK(std::abs(got.eps[i - 1] - acc) <= 1e-10 * (1.0 + max_abs));
    }
}

TEST_CASE("normalizer by family and regime") {
    SUBCASE("garch with kesten index one gives a_n = n") {
        // E (b eta^2)^{1/2} = sqrt(b) E|eta| = 1 at b = pi/2.
        const auto spec = garch_spec(1.0, 0.0, std::numbers::pi / 2.0);
        CHECK(kesten_index(spec) == doctest::Approx(1.0).epsilon(0.02));
        const double a_n = normalizer_a_n(spec, 10000);
        CHECK(a_n == doctest::Approx(10000.0).epsilon(0.05));
    }
    SUBCASE("garch with index above two gives sqrt(n)") {
        const auto spec = garch_spec(0.1, 0.4, 0.4);
        CHECK(normalizer_a_n(spec, 4096) == std::sqrt(4096.0));
    }
    SUBCASE("long-memory MA gives n^{3/2-theta} l(n)") {
        const auto spec = ma_spec(0.7, 0);
        CHECK(normalizer_a_n(spec, 10000) ==
              doctest::Approx(std::pow(10.0, 3.2)).epsilon(1e-12));
    }
    SUBCASE("short-memory MA gives sqrt(n)") {
        const auto spec = ma_spec(1.5, 100);
        CHECK(normalizer_a_n(spec, 256) == 16.0);
    }
    SUBCASE("stable families") {
        InnovationSpec s;
        s.family = Family::StableIID;
        s.alpha = 1.25;
        CHECK(normalizer_a_n(s, 100000) == std::pow(100000.0, 0.8));
        s.alpha = 2.0;
        CHECK(normalizer_a_n(s, 4096) == std::sqrt(4096.0 * std::log(4096.0)));
    }
}

TEST_CASE("samplers are reproducible and streams independent") {
    for (const auto& spec :
         {garch_spec(0.1, 0.4, 0.4), ma_spec(0.7, 256), [] {
              InnovationSpec s;
              s.family = Family::StableIID;
              s.alpha = 1.5;
              return s;
          }()}) {
        const auto a = sample_innovations(spec, 2000, NoiseStream{55, 3});
        const auto b = sample_innovations(spec, 2000, NoiseStream{55, 3});
        CHECK(a.eps == b.eps);
    }

    const auto spec = ma_spec(1.2, 64);
    const std::size_t n = 100000;
    const auto s1 = sample_innovations(spec, n, NoiseStream{56, 1});
    const auto s2 = sample_innovations(spec, n, NoiseStream{56, 2});
    const double m1 = sample_mean(s1.eps), m2 = sample_mean(s2.eps);
    double cov = 0, v1 = 0, v2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        cov += (s1.eps[i] - m1) * (s2.eps[i] - m2);
        v1 += (s1.eps[i] - m1) * (s1.eps[i] - m1);
        v2 += (s2.eps[i] - m2) * (s2.eps[i] - m2);
    }
    CHECK(std::abs(cov / std::sqrt(v1 * v2)) < 0.02);
}

TEST_CASE("centering: no drift at the family's own scale") {
    // Finite-variance families: |mean| sqrt(n) stays bounded; heavy tails:
    // |S_n| / a_n stays bounded.
    for (long n : {1000L, 10000L, 100000L}) {
        const auto g = sample_garch(garch_spec(0.1, 0.4, 0.4),
                                    static_cast<std::size_t>(n), NoiseStream{57, 0});
        CHECK(std::abs(sample_mean(g.eps)) * std::sqrt(static_cast<double>(n)) < 5.0);

        const auto m = sample_linear_ma(ma_spec(1.5, 100), static_cast<std::size_t>(n),
                                        NoiseStream{57, 1});
        CHECK(std::abs(sample_mean(m.eps)) * std::sqrt(static_cast<double>(n)) < 5.0);

        InnovationSpec s;
        s.family = Family::StableIID;
        s.alpha = 1.5;
        const auto v = sample_stable_iid(1.5, 0.0, static_cast<std::size_t>(n),
                                         NoiseStream{57, 2});
        double acc = 0;
        for (double x : v) acc += x;
        CHECK(std::abs(acc) / normalizer_a_n(s, static_cast<std::size_t>(n)) < 10.0);
    }
}

TEST_CASE("ma tail mass tracks the analytic tail") {
    auto spec = ma_spec(0.9, 0);
    const double mass = ma_tail_mass(spec, 1000);
    // Integral comparison: sum_{j>M} j^{-1.8} ~ M^{-0.8} / 0.8.
    const double approx = std::pow(1000.0, -0.8) / 0.8;
    CHECK(mass == doctest::Approx(approx).epsilon(0.01));
}

TEST_CASE("spec validation errors") {
    InnovationSpec s;
    s.family = Family::Garch11;
    s.omega = 0.0;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = InnovationSpec{};
    s.family = Family::LinearMA;
    s.theta = 0.5;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = InnovationSpec{};
    s.alpha = 0.0;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = InnovationSpec{};
    s.burn_in = -1;
    CHECK_THROWS_AS(s.validate(), ConfigError);
}
