#pragma once

#include <optional>

#include "unitmark/paths.hpp"

namespace unitmark {

/// Forward Riemann-Stieltjes sum
///   sum_j integrand(t_j) (integrator(t_{j+1}) - integrator(t_j)),
/// the integrand evaluated at left grid endpoints (the S(t-) convention).
/// Throws ConfigError on a grid mismatch.
double forward_integral(const PathGrid& integrand, const PathGrid& integrator);

/// Forward sum against one mark column of a field.
double forward_integral(const PathGrid& integrand, const FieldGrid& field,
                        std::size_t mark);

/// Trapezoid rule for int_0^1 path(t)^2 dt on the grid.
double trapezoid_square_integral(const PathGrid& path);

/// Left Riemann sum for int_0^1 path(t)^2 dt; matches the finite-n
/// normalization (1/n) sum X_{i-1}^2 / a_n^2 of the least-squares theory.
double left_riemann_square_integral(const PathGrid& path);

/// Trapezoid rule for int_0^1 a(t) b(t) dt.
double trapezoid_product_integral(const PathGrid& a, const PathGrid& b);

/// One draw of the quantile-estimate limit
///   -(1/f_at_qtau) * int_0^1 S(t-) dW(t, q_tau) / int_0^1 S^2(t) dt
/// with the numerator a forward sum and the denominator a trapezoid rule.
/// Empty when int S^2 dt < 1e-12 (degenerate draw, to be resampled).
std::optional<double> limit_quantile_error(const PathGrid& s_path,
                                           const PathGrid& w_at_mark,
                                           double f_at_qtau);

/// One draw of the least-squares limit 0.5 (S(1)^2 - s_squared) / int S^2 dt
/// with a left Riemann denominator. Empty on a degenerate denominator.
std::optional<double> limit_lse_error(const PathGrid& s_path, double s_squared_draw);

/// Degeneracy threshold shared by the limit draws.
inline constexpr double kDegenerateIntegral = 1e-12;

} // namespace unitmark
