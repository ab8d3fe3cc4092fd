#include "unitmark/integrals.hpp"

#include "unitmark/errors.hpp"

namespace unitmark {

double forward_integral(const PathGrid& integrand, const PathGrid& integrator) {
    if (integrand.k != integrator.k)
        throw ConfigError("forward_integral: integrand and integrator grids differ");
    double acc = 0.0;
    for (int j = 0; j < integrand.k; ++j) {
        const std::size_t u = static_cast<std::size_t>(j);
        acc += integrand.values[u] * (integrator.values[u + 1] - integrator.values[u]);
    }
    return acc;
}

double forward_integral(const PathGrid& integrand, const FieldGrid& field,
                        std::size_t mark) {
    if (integrand.k != field.k)
        throw ConfigError("forward_integral: integrand and field grids differ");
    if (mark >= field.x_grid.size())
        throw ConfigError("forward_integral: mark index out of range");
    double acc = 0.0;
    for (int j = 0; j < integrand.k; ++j) {
        acc += integrand.values[static_cast<std::size_t>(j)] *
               (field.at(j + 1, mark) - field.at(j, mark));
    }
    return acc;
}

double trapezoid_square_integral(const PathGrid& path) {
    double acc = 0.0;
    for (int j = 0; j <= path.k; ++j) {
        const double v = path.values[static_cast<std::size_t>(j)];
        const double w = (j == 0 || j == path.k) ? 0.5 : 1.0;
        acc += w * v * v;
    }
    return acc / static_cast<double>(path.k);
}

double left_riemann_square_integral(const PathGrid& path) {
    double acc = 0.0;
    for (int j = 0; j < path.k; ++j) {
        const double v = path.values[static_cast<std::size_t>(j)];
        acc += v * v;
    }
    return acc / static_cast<double>(path.k);
}

double trapezoid_product_integral(const PathGrid& a, const PathGrid& b) {
    if (a.k != b.k) throw ConfigError("trapezoid_product_integral: grids differ");
    double acc = 0.0;
    for (int j = 0; j <= a.k; ++j) {
        const double w = (j == 0 || j == a.k) ? 0.5 : 1.0;
        acc += w * a.values[static_cast<std::size_t>(j)] * b.values[static_cast<std::size_t>(j)];
    }
    return acc / static_cast<double>(a.k);
}

std::optional<double> limit_quantile_error(const PathGrid& s_path,
                                           const PathGrid& w_at_mark,
                                           double f_at_qtau) {
    if (!(f_at_qtau > 0.0))
        throw ConfigError("limit_quantile_error: f(F^{-1}(tau)) must be > 0");
    const double denom = trapezoid_square_integral(s_path);
    if (denom < kDegenerateIntegral) return std::nullopt;
    return -forward_integral(s_path, w_at_mark) / (f_at_qtau * denom);
}

std::optional<double> limit_lse_error(const PathGrid& s_path, double s_squared_draw) {
    if (!(s_squared_draw >= 0.0))
        throw ConfigError("limit_lse_error: s_squared_draw must be >= 0");
    const double denom = left_riemann_square_integral(s_path);
    if (denom < kDegenerateIntegral) return std::nullopt;
    const double s1 = s_path.terminal();
    return 0.5 * (s1 * s1 - s_squared_draw) / denom;
}

} // namespace unitmark
