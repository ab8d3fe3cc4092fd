#pragma once

#include <cstdint>
#include <vector>

#include "unitmark/innovations.hpp"

namespace unitmark {

struct PathGrid; // paths.hpp

/// One realized AR(1) path X_i = beta X_{i-1} + eps_i with provenance.
struct SeriesSample {
    std::vector<double> x;   // X_0 .. X_n
    std::vector<double> eps; // eps_1 .. eps_n
    double beta_true = 1.0;
    double a_n = 1.0;
    InnovationSpec spec;
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
    double truncation_tail_mass = 0.0;
    bool stationarity_warning = false;

    std::size_t n() const { return eps.size(); }
};

/// Applies the AR(1) recursion. beta = 1 gives X_i = x0 + prefix sums.
SeriesSample build_series(const std::vector<double>& eps, double beta, double x0);

/// Samples innovations from spec and builds the series, filling in a_n and
/// sampling metadata.
SeriesSample simulate_series(const InnovationSpec& spec, std::size_t n,
                             double beta, double x0, NoiseStream stream);

/// The normalized partial-sum step function t -> S_n(t)/a_n on [0, 1],
/// S_n(t) = sum_{i <= floor(n t)} eps_i. Jumps at t = i/n; the value at t
/// includes eps_{floor(n t)}.
class StepPath {
public:
    StepPath(const std::vector<double>& eps, double a_n);

    /// Throws ConfigError outside [0, 1].
    double at(double t) const;

    std::size_t n() const { return scaled_prefix_.size() - 1; }

private:
    std::vector<double> scaled_prefix_; // S_n(i/n)/a_n, i = 0..n
};

/// Step-path evaluation on the uniform grid t_j = j/k_points, j = 0..k_points,
/// as a PathGrid usable by the stochastic-integral routines.
PathGrid partial_sum_path(const SeriesSample& series, int k_points);

} // namespace unitmark
