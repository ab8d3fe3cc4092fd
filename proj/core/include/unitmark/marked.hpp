#pragma once

#include <span>
#include <string>
#include <vector>

#include "unitmark/distributions.hpp"
#include "unitmark/series.hpp"
#include "unitmark/weight.hpp"

namespace unitmark {

enum class CurveKind { TrueInnovations, Residual, ResidualRecentered };
enum class SupMode { Signed, Abs };

/// The marked empirical process evaluated on a mark grid, divided by its
/// normalization (sqrt(n) for short memory, a_n for long memory).
struct MarkedCurve {
    std::vector<double> x_grid;
    std::vector<double> values;
    double norm = 1.0;
    CurveKind kind = CurveKind::TrueInnovations;
    std::string g_id;
    std::string F_id;
};

/// Uniform mark grid on [-A, A].
std::vector<double> make_mark_grid(double A, int points);

/// norm^{-1} sum_i g(X_{i-1}/a_n) (I(eps_i <= x) - F(x)) per grid point,
/// computed by one sort of eps and a prefix-sum sweep over the grid. Agrees
/// bitwise with the direct double loop taken in ascending eps order.
MarkedCurve marked_empirical(const SeriesSample& series, const WeightFunction& g,
                             const Distribution& F, std::span<const double> x_grid);

/// Same with residuals eps_hat_i = X_i - beta_hat X_{i-1}.
MarkedCurve residual_marked_empirical(const SeriesSample& series, double beta_hat,
                                      const WeightFunction& g, const Distribution& F,
                                      std::span<const double> x_grid);

/// Long-memory recentered statistic:
/// a_n^{-1} [ hat_alpha_n(x) - f(x) (beta_hat - beta) sum_i g(X_{i-1}/a_n) X_{i-1} ].
/// f is the density evaluator of eps_1.
MarkedCurve recentered_residual_statistic(const SeriesSample& series, double beta_hat,
                                          const WeightFunction& g, const Distribution& F,
                                          const Distribution& f_density,
                                          std::span<const double> x_grid);

/// Signed maximum (default) or maximum absolute value over the grid.
double sup_functional(const MarkedCurve& curve, SupMode mode);

} // namespace unitmark
