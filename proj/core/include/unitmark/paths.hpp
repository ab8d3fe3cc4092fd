#pragma once

#include <vector>

#include "unitmark/distributions.hpp"
#include "unitmark/rng.hpp"

namespace unitmark {

/// A process sampled on the uniform time grid t_j = j/k, j = 0..k.
/// values[0] == 0 always.
struct PathGrid {
    int k = 0;
    std::vector<double> values; // size k + 1

    double t(int j) const { return static_cast<double>(j) / k; }
    double terminal() const { return values.back(); }
};

enum class CovModel { PlugInIID, LongRunEstimate };

/// A two-parameter Gaussian field draw W(t_j, x_m): Brownian in t for fixed
/// x, mark covariance Gamma across x. Row-major (time major).
struct FieldGrid {
    int k = 0;
    std::vector<double> x_grid;
    std::vector<double> w; // (k+1) x m, w[j*m + idx]

    double at(int j, std::size_t mark) const { return w[static_cast<std::size_t>(j) * x_grid.size() + mark]; }
};

/// S(t_j) = k^{-1/alpha} sum_{i<=j} zeta_i with zeta i.i.d. stable.
/// At alpha = 2 the path is Brownian with variance-2 increments;
/// unit_variance rescales it to a standard Brownian motion.
PathGrid simulate_stable_path(double alpha, double skew, int k, RandomStream& rs,
                              bool unit_variance = false);
PathGrid simulate_stable_path(double alpha, double skew, int k, NoiseStream stream,
                              bool unit_variance = false);

/// Fractional Brownian motion with Hurst index H = 3/2 - theta on k steps,
/// Var Z(1) = 1, via circulant embedding of the increment covariance with a
/// dense Cholesky fallback (k <= 4096) when the embedding spectrum dips
/// below -1e-9.
PathGrid simulate_fbm(double theta, int k, RandomStream& rs);
PathGrid simulate_fbm(double theta, int k, NoiseStream stream);

/// Mark covariance under the selected model:
///   PlugInIID      : Gamma(x, y) = F(min(x,y)) - F(x) F(y)
///   LongRunEstimate: batch-means estimate from simulated innovations
///                    (see estimate_long_run_cov).
struct MarkCovariance {
    std::vector<double> x_grid;
    std::vector<double> gamma; // m x m, row-major
    CovModel model = CovModel::PlugInIID;

    double at(std::size_t i, std::size_t j) const { return gamma[i * x_grid.size() + j]; }
};

MarkCovariance plug_in_iid_cov(const Distribution& F, const std::vector<double>& x_grid);

/// Batch-means long-run covariance of the indicator process over marks:
/// split n_sim innovations into floor(sqrt(n_sim)) blocks and average the
/// normalized block products.
struct InnovationSpec;
MarkCovariance estimate_long_run_cov(const InnovationSpec& spec, const Distribution& F,
                                     const std::vector<double>& x_grid,
                                     std::size_t n_sim, NoiseStream stream);

/// Lower-triangular factor L with L L^T = Gamma. Uses Cholesky, falling back
/// to an eigendecomposition with negative eigenvalues clipped at 0; throws
/// NumericalError if any eigenvalue is below -1e-8.
std::vector<double> factor_mark_covariance(const MarkCovariance& cov);

/// W(t_j, x_m) = sum_{r<=j} G_r(x_m)/sqrt(k), G_r i.i.d. N(0, Gamma).
FieldGrid simulate_mark_field(int k, const MarkCovariance& cov, RandomStream& rs);
FieldGrid simulate_mark_field(int k, const MarkCovariance& cov, NoiseStream stream);

/// Same, from a precomputed covariance factor (one factorization per
/// ensemble instead of per draw).
FieldGrid simulate_mark_field_factored(int k, const std::vector<double>& x_grid,
                                       const std::vector<double>& factor,
                                       RandomStream& rs);

/// Pointwise transform g(path).
struct WeightFunction;
PathGrid transform_path(const PathGrid& path, const WeightFunction& g);

/// Every-other-point (or general stride) coarsening; used by refinement
/// tests. k must be divisible by factor.
PathGrid subsample_path(const PathGrid& path, int factor);
FieldGrid subsample_field(const FieldGrid& field, int factor);

} // namespace unitmark
