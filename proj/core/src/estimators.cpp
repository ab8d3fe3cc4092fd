#include "unitmark/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "unitmark/errors.hpp"

namespace unitmark {

std::string to_string(EstimMethod m) {
    return m == EstimMethod::QuantileTau ? "quantile" : "lse";
}

double check_loss(double y, double tau) { return y * (tau - (y <= 0.0 ? 1.0 : 0.0)); }

double quantile_objective(const SeriesSample& series, double beta, double tau,
                          double q_tau) {
    double acc = 0.0;
    for (std::size_t i = 0; i < series.n(); ++i) {
        acc += check_loss(series.x[i + 1] - beta * series.x[i] - q_tau, tau);
    }
    return acc;
}

namespace {

struct Breakpoint {
    double b;
    double jump; // |X_{i-1}|
};

// Walks the sorted breakpoints of the convex piecewise-linear criterion.
// The subgradient starts negative at beta = -inf and gains |X_{i-1}| at each
// breakpoint b_i = (X_i - q) / X_{i-1}; the minimizer is where it crosses 0.
EstimateResult solve_breakpoints(const SeriesSample& series, double tau, double q_tau) {
    if (!(tau > 0.0 && tau < 1.0)) throw ConfigError("tau must lie in (0, 1)");
    const std::size_t n = series.n();
    std::vector<Breakpoint> bps;
    bps.reserve(n);
    double g_start = 0.0;
    long dropped = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double xlag = series.x[i];
        if (xlag == 0.0) {
            ++dropped;
            continue;
        }
        bps.push_back({(series.x[i + 1] - q_tau) / xlag, std::abs(xlag)});
        // At beta -> -inf the residual sign equals sign(X_{i-1}).
        g_start -= xlag * (tau - (xlag < 0.0 ? 1.0 : 0.0));
    }
    if (bps.empty())
        throw UnidentifiedError("quantile criterion is constant: all X_{i-1} are zero");
    std::sort(bps.begin(), bps.end(),
              [](const Breakpoint& p, const Breakpoint& q) { return p.b < q.b; });

    EstimateResult res;
    res.method = EstimMethod::QuantileTau;
    res.tau = tau;
    res.q_tau = q_tau;
    res.dropped_terms = dropped;

    double g = g_start;
    for (std::size_t j = 0; j < bps.size(); ++j) {
        const double g_before = g;
        g += bps[j].jump;
        // Merge jumps sharing one abscissa before testing the sign.
        while (j + 1 < bps.size() && bps[j + 1].b == bps[j].b) {
            ++j;
            g += bps[j].jump;
        }
        if (g >= 0.0) {
            res.subgradient_left = g_before;
            res.subgradient_right = g;
            if (g == 0.0 && j + 1 < bps.size()) {
                // Flat stretch: return the midpoint, record the interval.
                res.interval_lo = bps[j].b;
                res.interval_hi = bps[j + 1].b;
                res.beta_hat = 0.5 * (res.interval_lo + res.interval_hi);
            } else {
                res.interval_lo = res.interval_hi = bps[j].b;
                res.beta_hat = bps[j].b;
            }
            res.objective_at_min = quantile_objective(series, res.beta_hat, tau, q_tau);
            return res;
        }
    }
    // Subgradient stays negative only if total weight cancels; cannot happen
    // with at least one nonzero X_{i-1}, but keep a defined answer.
    res.beta_hat = bps.back().b;
    res.interval_lo = res.interval_hi = res.beta_hat;
    res.objective_at_min = quantile_objective(series, res.beta_hat, tau, q_tau);
    return res;
}

// tau-quantile of v as the minimizer of sum rho_tau(v_i - q): the
// ceil(n tau)-th order statistic, or the interval midpoint when n tau is an
// integer.
double tau_quantile(std::vector<double> v, double tau) {
    std::sort(v.begin(), v.end());
    const double target = tau * static_cast<double>(v.size());
    const double r = std::ceil(target);
    const std::size_t k = static_cast<std::size_t>(r);
    if (r == target && k < v.size()) {
        return 0.5 * (v[k - 1] + v[k]);
    }
    return v[std::min(v.size() - 1, k == 0 ? 0 : k - 1)];
}

} // namespace

EstimateResult quantile_estimate(const SeriesSample& series, double tau, double q_tau) {
    if (series.n() == 0) throw ConfigError("empty series");
    auto res = solve_breakpoints(series, tau, q_tau);
    res.scaled_error = series.a_n * std::sqrt(static_cast<double>(series.n())) *
                       (res.beta_hat - series.beta_true);
    return res;
}

EstimateResult quantile_estimate_adaptive(const SeriesSample& series, double tau) {
    if (series.n() == 0) throw ConfigError("empty series");
    double q = 0.0;
    EstimateResult res;
    double prev_obj = std::numeric_limits<double>::infinity();
    int iter = 0;
    for (; iter < 20; ++iter) {
        res = solve_breakpoints(series, tau, q);
        std::vector<double> resid(series.n());
        for (std::size_t i = 0; i < series.n(); ++i) {
            resid[i] = series.x[i + 1] - res.beta_hat * series.x[i];
        }
        q = tau_quantile(std::move(resid), tau);
        const double obj = quantile_objective(series, res.beta_hat, tau, q);
        if (std::abs(prev_obj - obj) < 1e-10) break;
        prev_obj = obj;
    }
    res = solve_breakpoints(series, tau, q);
    res.iterations = iter + 1;
    res.scaled_error = series.a_n * std::sqrt(static_cast<double>(series.n())) *
                       (res.beta_hat - series.beta_true);
    return res;
}

EstimateResult lse_estimate(const SeriesSample& series) {
    if (series.n() == 0) throw ConfigError("empty series");
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < series.n(); ++i) {
        num += series.x[i] * series.x[i + 1];
        den += series.x[i] * series.x[i];
    }
    if (den <= 0.0) throw UnidentifiedError("sum of squared lags is zero");
    EstimateResult res;
    res.method = EstimMethod::LSE;
    res.beta_hat = num / den;
    res.interval_lo = res.interval_hi = res.beta_hat;
    res.scaled_error = static_cast<double>(series.n()) * (res.beta_hat - series.beta_true);
    double obj = 0.0;
    for (std::size_t i = 0; i < series.n(); ++i) {
        const double r = series.x[i + 1] - res.beta_hat * series.x[i];
        obj += r * r;
    }
    res.objective_at_min = obj;
    return res;
}

} // namespace unitmark
