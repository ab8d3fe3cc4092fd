#pragma once

#include <string>

#include "unitmark/series.hpp"

namespace unitmark {

enum class EstimMethod { QuantileTau, LSE };

std::string to_string(EstimMethod m);

struct EstimateResult {
    double beta_hat = 0.0;
    EstimMethod method = EstimMethod::LSE;
    double tau = 0.5; // QuantileTau only
    /// a_n sqrt(n) (beta_hat - beta_true) for the quantile estimate,
    /// n (beta_hat - beta_true) for least squares.
    double scaled_error = 0.0;
    double objective_at_min = 0.0;
    /// Minimizing interval of the piecewise-linear criterion; collapses to a
    /// point unless the subgradient is exactly zero on a segment.
    double interval_lo = 0.0;
    double interval_hi = 0.0;
    /// One-sided subgradients at beta_hat (quantile only).
    double subgradient_left = 0.0;
    double subgradient_right = 0.0;
    /// Terms with X_{i-1} = 0, constant in beta and dropped from the walk.
    long dropped_terms = 0;
    /// Alternating iterations used by the q-estimating mode.
    int iterations = 0;
    /// q used by the criterion (given, or estimated in the adaptive mode).
    double q_tau = 0.0;
};

/// Exact global minimizer of beta -> sum_i rho_tau(X_i - beta X_{i-1} - q_tau)
/// via the sorted-breakpoint subgradient walk. q_tau = F^{-1}(tau) is taken
/// as known. Throws UnidentifiedError when every X_{i-1} is zero.
EstimateResult quantile_estimate(const SeriesSample& series, double tau, double q_tau);

/// Extension beyond the known-intercept setting: alternates the beta walk
/// with a tau-quantile update of q until the objective is stationary
/// (at most 20 iterations or an objective change below 1e-10).
EstimateResult quantile_estimate_adaptive(const SeriesSample& series, double tau);

/// beta_hat = sum X_{i-1} X_i / sum X_{i-1}^2. Throws UnidentifiedError when
/// the denominator vanishes.
EstimateResult lse_estimate(const SeriesSample& series);

/// The check loss rho_tau(y) = y (tau - I(y <= 0)).
double check_loss(double y, double tau);

/// Criterion value at an arbitrary beta (diagnostics, grid oracles).
double quantile_objective(const SeriesSample& series, double beta, double tau, double q_tau);

} // namespace unitmark
