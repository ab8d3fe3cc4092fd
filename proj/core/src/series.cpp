#include "unitmark/series.hpp"

#include <cmath>

#include "unitmark/errors.hpp"
#include "unitmark/paths.hpp"

namespace unitmark {

SeriesSample build_series(const std::vector<double>& eps, double beta, double x0) {
    if (eps.empty()) throw ConfigError("build_series: eps must be nonempty");
    SeriesSample s;
    s.eps = eps;
    s.beta_true = beta;
    s.x.resize(eps.size() + 1);
    s.x[0] = x0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        s.x[i + 1] = beta * s.x[i] + eps[i];
    }
    return s;
}

SeriesSample simulate_series(const InnovationSpec& spec, std::size_t n, double beta,
                             double x0, NoiseStream stream) {
    auto sample = sample_innovations(spec, n, stream);
    auto series = build_series(sample.eps, beta, x0);
    series.spec = spec;
    series.a_n = normalizer_a_n(spec, n);
    series.seed = stream.seed;
    series.stream_id = stream.stream_id;
    series.truncation_tail_mass = sample.truncation_tail_mass;
    series.stationarity_warning = sample.stationarity_warning;
    return series;
}

StepPath::StepPath(const std::vector<double>& eps, double a_n) {
    scaled_prefix_.resize(eps.size() + 1);
    scaled_prefix_[0] = 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        acc += eps[i];
        scaled_prefix_[i + 1] = acc / a_n;
    }
}

double StepPath::at(double t) const {
    if (!(t >= 0.0 && t <= 1.0)) throw ConfigError("step path evaluated outside [0, 1]");
    const std::size_t nn = scaled_prefix_.size() - 1;
    const std::size_t idx =
        std::min(nn, static_cast<std::size_t>(std::floor(t * static_cast<double>(nn))));
    return scaled_prefix_[idx];
}

PathGrid partial_sum_path(const SeriesSample& series, int k_points) {
    if (k_points < 1) throw ConfigError("k_points must be >= 1");
    StepPath path(series.eps, series.a_n);
    PathGrid grid;
    grid.k = k_points;
    grid.values.resize(static_cast<std::size_t>(k_points) + 1);
    for (int j = 0; j <= k_points; ++j) {
        grid.values[static_cast<std::size_t>(j)] =
            path.at(static_cast<double>(j) / static_cast<double>(k_points));
    }
    return grid;
}

} // namespace unitmark
