#include "unitmark/marked.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "unitmark/errors.hpp"

namespace unitmark {

namespace {

double curve_norm(const SeriesSample& series) {
    return is_long_memory(series.spec) ? series.a_n
                                       : std::sqrt(static_cast<double>(series.n()));
}

std::vector<double> path_weights(const SeriesSample& series, const WeightFunction& g) {
    const std::size_t n = series.n();
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = g(series.x[i] / series.a_n);
    return w;
}

// Shared sweep kernel: values[m] = (sum_{e_i <= x_m} w_i - F(x_m) W) / norm.
// Indicator sums accumulate in ascending (e, index) order; the total weight
// W accumulates in original index order.
MarkedCurve sweep_curve(const std::vector<double>& marks, const std::vector<double>& w,
                        const std::vector<double>& e, const Distribution& F, double norm) {
    const std::size_t n = e.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        if (e[i] != e[j]) return e[i] < e[j];
        return i < j;
    });
    std::vector<double> sorted_e(n);
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        sorted_e[r] = e[order[r]];
        prefix[r + 1] = prefix[r] + w[order[r]];
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += w[i];

    MarkedCurve curve;
    curve.x_grid.assign(marks.begin(), marks.end());
    curve.values.resize(marks.size());
    for (std::size_t m = 0; m < marks.size(); ++m) {
        const auto it = std::upper_bound(sorted_e.begin(), sorted_e.end(), marks[m]);
        const std::size_t cnt = static_cast<std::size_t>(it - sorted_e.begin());
        curve.values[m] = (prefix[cnt] - F.cdf(marks[m]) * total) / norm;
    }
    curve.norm = norm;
    curve.F_id = F.id();
    return curve;
}

void check_inputs(const SeriesSample& series, std::span<const double> x_grid) {
    if (series.n() == 0) throw ConfigError("series has no innovations");
    if (x_grid.size() < 2) throw ConfigError("mark grid needs at least 2 points");
    for (std::size_t m = 1; m < x_grid.size(); ++m) {
        if (!(x_grid[m] > x_grid[m - 1]))
            throw ConfigError("mark grid must be strictly ascending");
    }
}

} // namespace

std::vector<double> make_mark_grid(double A, int points) {
    if (!(A > 0.0) || points < 2) throw ConfigError("mark grid needs A > 0 and >= 2 points");
    std::vector<double> grid(points);
    for (int m = 0; m < points; ++m) {
        grid[static_cast<std::size_t>(m)] =
            -A + 2.0 * A * static_cast<double>(m) / static_cast<double>(points - 1);
    }
    return grid;
}

MarkedCurve marked_empirical(const SeriesSample& series, const WeightFunction& g,
                             const Distribution& F, std::span<const double> x_grid) {
    check_inputs(series, x_grid);
    const auto w = path_weights(series, g);
    std::vector<double> marks(x_grid.begin(), x_grid.end());
    auto curve = sweep_curve(marks, w, series.eps, F, curve_norm(series));
    curve.kind = CurveKind::TrueInnovations;
    curve.g_id = g.id();
    return curve;
}

MarkedCurve residual_marked_empirical(const SeriesSample& series, double beta_hat,
                                      const WeightFunction& g, const Distribution& F,
                                      std::span<const double> x_grid) {
    check_inputs(series, x_grid);
    const auto w = path_weights(series, g);
    const std::size_t n = series.n();
    std::vector<double> resid(n);
    for (std::size_t i = 0; i < n; ++i) resid[i] = series.x[i + 1] - beta_hat * series.x[i];
    std::vector<double> marks(x_grid.begin(), x_grid.end());
    auto curve = sweep_curve(marks, w, resid, F, curve_norm(series));
    curve.kind = CurveKind::Residual;
    curve.g_id = g.id();
    return curve;
}

MarkedCurve recentered_residual_statistic(const SeriesSample& series, double beta_hat,
                                          const WeightFunction& g, const Distribution& F,
                                          const Distribution& f_density,
                                          std::span<const double> x_grid) {
    check_inputs(series, x_grid);
    if (!is_long_memory(series.spec))
        throw ConfigError("recentered residual statistic requires a long-memory spec");
    auto curve = residual_marked_empirical(series, beta_hat, g, F, x_grid);
    // residual curve is already divided by a_n for long-memory specs.
    double weighted_lag = 0.0;
    for (std::size_t i = 0; i < series.n(); ++i) {
        weighted_lag += g(series.x[i] / series.a_n) * series.x[i];
    }
    const double shift = (beta_hat - series.beta_true) * weighted_lag / series.a_n;
    for (std::size_t m = 0; m < curve.values.size(); ++m) {
        curve.values[m] -= f_density.pdf(curve.x_grid[m]) * shift;
    }
    curve.kind = CurveKind::ResidualRecentered;
    return curve;
}

double sup_functional(const MarkedCurve& curve, SupMode mode) {
    if (curve.values.empty()) throw ConfigError("sup_functional on an empty curve");
    double best = mode == SupMode::Signed ? curve.values.front()
                                          : std::abs(curve.values.front());
    for (const double v : curve.values) {
        best = std::max(best, mode == SupMode::Signed ? v : std::abs(v));
    }
    return best;
}

} // namespace unitmark
