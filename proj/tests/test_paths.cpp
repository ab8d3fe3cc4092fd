#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "unitmark/errors.hpp"
#include "unitmark/harness.hpp"
#include "unitmark/integrals.hpp"
#include "unitmark/paths.hpp"
#include "unitmark/weight.hpp"

using namespace unitmark;

namespace {

double sample_mean(const std::vector<double>& v) {
    double acc = 0;
    for (double x : v) acc += x;
    return acc / static_cast<double>(v.size());
}

double sample_cov(const std::vector<double>& a, const std::vector<double>& b) {
    const double ma = sample_mean(a), mb = sample_mean(b);
    double acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - ma) * (b[i] - mb);
    return acc / static_cast<double>(a.size() - 1);
}

double fbm_cov(double H, double s, double t) {
    return 0.5 * (std::pow(s, 2 * H) + std::pow(t, 2 * H) -
                  std::pow(std::abs(t - s), 2 * H));
}

} // namespace

TEST_CASE("stable path basics") {
    SUBCASE("starts at zero") {
        const auto p = simulate_stable_path(1.5, 0.0, 64, NoiseStream{111, 0});
        CHECK(p.values[0] == 0.0);
        CHECK(p.values.size() == 65);
    }
    SUBCASE("alpha=2 terminal variance") {
        std::vector<double> terminal(4000), unit(4000);
        for (int r = 0; r < 4000; ++r) {
            const auto s = static_cast<std::uint64_t>(r);
            terminal[static_cast<std::size_t>(r)] =
                simulate_stable_path(2.0, 0.0, 64, NoiseStream{112, s}).terminal();
            unit[static_cast<std::size_t>(r)] =
                simulate_stable_path(2.0, 0.0, 64, NoiseStream{113, s}, true).terminal();
        }
        CHECK(sample_cov(terminal, terminal) == doctest::Approx(2.0).epsilon(0.05));
        CHECK(sample_cov(unit, unit) == doctest::Approx(1.0).epsilon(0.05));
    }
    SUBCASE("self-similarity in law") {
        // S(1/2) 2^{1/alpha} and S(1) from independent draws: two-sample KS.
        const double alpha = 1.5;
        const int R = 10000;
        std::vector<double> a(R), b(R);
        for (int r = 0; r < R; ++r) {
            const auto p = simulate_stable_path(alpha, 0.0, 256,
                                                NoiseStream{114, static_cast<std::uint64_t>(r)});
            a[static_cast<std::size_t>(r)] =
                p.values[128] * std::pow(2.0, 1.0 / alpha);
            const auto q = simulate_stable_path(alpha, 0.0, 256,
                                                NoiseStream{115, static_cast<std::uint64_t>(r)});
            b[static_cast<std::size_t>(r)] = q.terminal();
        }
        CHECK(two_sample_ks(a, b) < 0.03);
    }
}

TEST_CASE("fractional Brownian motion") {
    SUBCASE("theta=1 boundary is ordinary Brownian motion") {
        const int R = 10000;
        std::vector<double> half(R), one(R);
        for (int r = 0; r < R; ++r) {
            const auto p = simulate_fbm(1.0, 64, NoiseStream{116, static_cast<std::uint64_t>(r)});
            half[static_cast<std::size_t>(r)] = p.values[32];
            one[static_cast<std::size_t>(r)] = p.terminal();
        }
        CHECK(sample_cov(one, one) == doctest::Approx(1.0).epsilon(0.03));
        // cov(Z(s), Z(t)) = min(s, t) for BM.
        CHECK(sample_cov(half, one) == doctest::Approx(0.5).epsilon(0.10));
    }
    SUBCASE("covariance against the closed form, theta = 0.7") {
        const double theta = 0.7, H = 1.5 - theta;
        const int R = 10000;
        std::vector<double> zs(R), zt(R);
        for (int r = 0; r < R; ++r) {
            const auto p = simulate_fbm(theta, 64, NoiseStream{117, static_cast<std::uint64_t>(r)});
            zs[static_cast<std::size_t>(r)] = p.values[16]; // t = 0.25
            zt[static_cast<std::size_t>(r)] = p.terminal(); // t = 1
        }
        const double expect = fbm_cov(H, 0.25, 1.0);
        const double vs = fbm_cov(H, 0.25, 0.25), vt = 1.0;
        const double se = std::sqrt((vs * vt + expect * expect) / R);
        CHECK(std::abs(sample_cov(zs, zt) - expect) < 3.0 * se);
        CHECK(sample_cov(zt, zt) == doctest::Approx(1.0).epsilon(0.03));
    }
    SUBCASE("parameter validation") {
        CHECK_THROWS_AS(simulate_fbm(0.5, 64, NoiseStream{1, 0}), ConfigError);
        CHECK_THROWS_AS(simulate_fbm(1.2, 64, NoiseStream{1, 0}), ConfigError);
        CHECK_THROWS_AS(simulate_fbm(0.7, 8, NoiseStream{1, 0}), ConfigError);
    }
}

TEST_CASE("mark covariance models") {
    const auto F = make_normal(1.0);
    const std::vector<double> grid{-0.5244005127080407, 0.0, 0.2533471031357997};
    // F values: 0.30, 0.50, 0.60.
    const auto cov = plug_in_iid_cov(*F, grid);
    CHECK(cov.at(0, 2) == doctest::Approx(0.3 - 0.3 * 0.6).epsilon(1e-4));
    CHECK(cov.at(1, 1) == doctest::Approx(0.25).epsilon(1e-9));

    SUBCASE("factor reproduces the covariance") {
        const auto L = factor_mark_covariance(cov);
        const std::size_t m = grid.size();
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                double acc = 0;
                for (std::size_t c = 0; c < m; ++c) acc += L[i * m + c] * L[j * m + c];
                CHECK(acc == doctest::Approx(cov.at(i, j)).epsilon(1e-9));
            }
        }
    }
    SUBCASE("hard negative eigenvalue rejected") {
        MarkCovariance bad;
        bad.x_grid = {0.0, 1.0};
        bad.gamma = {1.0, 2.0, 2.0, 1.0}; // eigenvalues 3 and -1
        CHECK_THROWS_AS(factor_mark_covariance(bad), NumericalError);
    }
    SUBCASE("tiny negative eigenvalue clipped") {
        MarkCovariance near;
        near.x_grid = {0.0, 1.0};
        near.gamma = {1.0, 1.0 + 5e-10, 1.0 + 5e-10, 1.0};
        const auto L = factor_mark_covariance(near);
        CHECK(L.size() == 4);
    }
    SUBCASE("long-run estimate recovers iid covariance for iid innovations") {
        InnovationSpec spec;
        spec.family = Family::LinearMA;
        spec.theta = 1.5;
        spec.truncation = 1; // iid N(0,1)
        const auto est = estimate_long_run_cov(spec, *F, grid, 1 << 16, NoiseStream{118, 0});
        for (std::size_t i = 0; i < grid.size(); ++i) {
            for (std::size_t j = 0; j < grid.size(); ++j) {
                CHECK(est.at(i, j) == doctest::Approx(cov.at(i, j)).epsilon(0.15));
            }
        }
    }
}

TEST_CASE("mark field marginals") {
    const auto F = make_normal(1.0);
    const std::vector<double> grid{-0.5244005127080407, 0.0, 0.2533471031357997};
    const auto cov = plug_in_iid_cov(*F, grid);
    const auto L = factor_mark_covariance(cov);
    const int R = 10000, k = 64;
    std::vector<double> w_half(R), w_one(R), w_x(R), w_y(R);
    std::vector<double> inc_a(R), inc_b(R);
    for (int r = 0; r < R; ++r) {
        RandomStream rs(119, static_cast<std::uint64_t>(r));
        const auto field = simulate_mark_field_factored(k, grid, L, rs);
        w_half[static_cast<std::size_t>(r)] = field.at(k / 2, 1);
        w_one[static_cast<std::size_t>(r)] = field.at(k, 1);
        w_x[static_cast<std::size_t>(r)] = field.at(k, 0);
        w_y[static_cast<std::size_t>(r)] = field.at(k, 2);
        inc_a[static_cast<std::size_t>(r)] = field.at(k / 2, 1) - field.at(0, 1);
        inc_b[static_cast<std::size_t>(r)] = field.at(k, 1) - field.at(k / 2, 1);
    }
    // Var W(1, x) = F(x)(1 - F(x)) = 1/4 at the median mark.
    CHECK(sample_cov(w_one, w_one) == doctest::Approx(0.25).epsilon(0.03));
    // Linear in t.
    CHECK(sample_cov(w_half, w_half) / sample_cov(w_one, w_one) ==
          doctest::Approx(0.5).epsilon(0.05));
    // Mark covariance F(min) - F(x) F(y) = 0.3 - 0.18 = 0.12.
    const double se = std::sqrt((0.3 * 0.7 * 0.6 * 0.4 + 0.12 * 0.12) / R);
    CHECK(std::abs(sample_cov(w_x, w_y) - 0.12) < 3.0 * se);
    // Independent increments over disjoint intervals.
    const double corr = sample_cov(inc_a, inc_b) /
                        std::sqrt(sample_cov(inc_a, inc_a) * sample_cov(inc_b, inc_b));
    CHECK(std::abs(corr) < 0.02);
    // W(0, x) = 0 for all marks.
    RandomStream rs(119, 0);
    const auto field = simulate_mark_field_factored(k, grid, L, rs);
    for (std::size_t m = 0; m < grid.size(); ++m) CHECK(field.at(0, m) == 0.0);
}

TEST_CASE("forward integrals") {
    RandomStream rs(120, 0);
    PathGrid s;
    s.k = 32;
    s.values.assign(33, 0.0);
    for (int j = 1; j <= 32; ++j) {
        s.values[static_cast<std::size_t>(j)] =
            s.values[static_cast<std::size_t>(j - 1)] + rs.next_normal();
    }
    SUBCASE("zero integrand") {
        const auto z = transform_path(s, WeightFunction::named("zero"));
        CHECK(forward_integral(z, s) == 0.0);
    }
    SUBCASE("unit integrand telescopes") {
        const auto one = transform_path(s, WeightFunction::named("one"));
        CHECK(forward_integral(one, s) == doctest::Approx(s.terminal()).epsilon(1e-12));
    }
    SUBCASE("grid mismatch throws") {
        PathGrid t;
        t.k = 16;
        t.values.assign(17, 0.0);
        CHECK_THROWS_AS(forward_integral(s, t), ConfigError);
    }
    SUBCASE("linearity in the integrand") {
        const auto g1 = transform_path(s, WeightFunction::named("identity"));
        PathGrid doubled = g1;
        for (auto& v : doubled.values) v *= 2.0;
        CHECK(forward_integral(doubled, s) == doctest::Approx(2.0 * forward_integral(g1, s))
                                                  .epsilon(1e-12));
    }
}

TEST_CASE("young integral identity for smooth-enough paths") {
    // Forward sums of int Z dZ approach Z(1)^2 / 2 as the mesh refines; the
    // gap is half the discrete quadratic variation.
    const double theta = 0.7;
    std::vector<double> medians;
    for (int k : {1 << 8, 1 << 10, 1 << 12}) {
        std::vector<double> gaps;
        for (int r = 0; r < 30; ++r) {
            const auto z = simulate_fbm(theta, k, NoiseStream{121, static_cast<std::uint64_t>(r)});
            const auto gz = transform_path(z, WeightFunction::named("identity"));
            const double riemann = forward_integral(gz, z);
            gaps.push_back(std::abs(riemann - 0.5 * z.terminal() * z.terminal()));
        }
        std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
        medians.push_back(gaps[gaps.size() / 2]);
    }
    CHECK(medians[1] < medians[0]);
    CHECK(medians[2] < medians[1]);
}

TEST_CASE("limit draw building blocks") {
    PathGrid s;
    s.k = 32;
    s.values.assign(33, 0.0);

    SUBCASE("degenerate denominator is rejected") {
        PathGrid w = s;
        CHECK_FALSE(limit_quantile_error(s, w, 0.25).has_value());
        CHECK_FALSE(limit_lse_error(s, 1.0).has_value());
    }
    SUBCASE("doubling the density halves the draw") {
        RandomStream rs(122, 0);
        for (int j = 1; j <= 32; ++j) {
            s.values[static_cast<std::size_t>(j)] =
                s.values[static_cast<std::size_t>(j - 1)] + rs.next_normal();
        }
        PathGrid w = s;
        for (int j = 1; j <= 32; ++j) {
            w.values[static_cast<std::size_t>(j)] =
                w.values[static_cast<std::size_t>(j - 1)] + rs.next_normal();
        }
        const auto d1 = limit_quantile_error(s, w, 0.2);
        const auto d2 = limit_quantile_error(s, w, 0.4);
        REQUIRE(d1.has_value());
        REQUIRE(d2.has_value());
        CHECK(*d2 == doctest::Approx(*d1 / 2.0).epsilon(1e-12));
    }
    SUBCASE("lse limit vanishes when the terminal square equals s^2") {
        RandomStream rs(123, 0);
        for (int j = 1; j <= 32; ++j) {
            s.values[static_cast<std::size_t>(j)] =
                s.values[static_cast<std::size_t>(j - 1)] + rs.next_normal();
        }
        const double s1 = s.terminal();
        const auto d = limit_lse_error(s, s1 * s1);
        REQUIRE(d.has_value());
        CHECK(*d == 0.0);
    }
    SUBCASE("negative s^2 rejected") {
        CHECK_THROWS_AS(limit_lse_error(s, -1.0), ConfigError);
        CHECK_THROWS_AS(limit_quantile_error(s, s, 0.0), ConfigError);
    }
}

TEST_CASE("subsampling paths and fields") {
    RandomStream rs(124, 0);
    PathGrid p;
    p.k = 64;
    p.values.assign(65, 0.0);
    for (int j = 1; j <= 64; ++j)
        p.values[static_cast<std::size_t>(j)] = rs.next_normal();
    const auto q = subsample_path(p, 4);
    CHECK(q.k == 16);
    for (int j = 0; j <= 16; ++j)
        CHECK(q.values[static_cast<std::size_t>(j)] ==
              p.values[static_cast<std::size_t>(4 * j)]);
    CHECK_THROWS_AS(subsample_path(p, 3), ConfigError);
}
