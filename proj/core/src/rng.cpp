#include "unitmark/rng.hpp"

#include <numbers>

namespace unitmark {

double stable_draw(double alpha, double skew, RandomStream& rs) {
    const double u = std::numbers::pi * (rs.next_unit() - 0.5); // (-pi/2, pi/2)
    const double w = rs.next_exponential();
    if (alpha == 1.0) {
        const double half_pi = std::numbers::pi / 2.0;
        const double t = half_pi + skew * u;
        return (t * std::tan(u) -
                skew * std::log((half_pi * w * std::cos(u)) / t)) /
               half_pi;
    }
    const double zeta = skew * std::tan(std::numbers::pi * alpha / 2.0);
    const double offset = std::atan(zeta) / alpha;
    const double scale = std::pow(1.0 + zeta * zeta, 0.5 / alpha);
    const double su = std::sin(alpha * (u + offset));
    const double cu = std::cos(u);
    const double tail = std::cos(u - alpha * (u + offset)) / w;
    return scale * su / std::pow(cu, 1.0 / alpha) *
           std::pow(tail, (1.0 - alpha) / alpha);
}

} // namespace unitmark
