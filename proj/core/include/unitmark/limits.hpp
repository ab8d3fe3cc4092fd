#pragma once

#include <optional>
#include <string>
#include <vector>

#include "unitmark/distributions.hpp"
#include "unitmark/innovations.hpp"
#include "unitmark/integrals.hpp"
#include "unitmark/marked.hpp"
#include "unitmark/paths.hpp"
#include "unitmark/weight.hpp"

namespace unitmark {

/// Which limit functional the ensemble draws.
enum class LimitKind {
    MarkedSupShort,      // sup_x  int g(S(t-)) dW(t, x)
    MarkedSupLong,       // sup_x  f(x) int g(Z_theta) dZ_theta
    ResidualSupQuantile, // sup_x  f(x) Q int g(S) S dt + int g(S(t-)) dW(t, x)
    ResidualSupLseHeavy, // sup_x  f(x) int S(t-) dS int g(S) S dt / int S^2 dt
    ResidualSupLseRootN, // sup_x  f(x) int S(t-) dS int g(S) S dt / int S^2 dt
                         //        + int g(S(t-)) dW(t, x)
    QuantileError,       // -(1/f(q)) int S(t-) dW(t, q) / int S^2 dt
    LseError             // (S(1)^2 - s^2) / (2 int S^2 dt)
};

std::string to_string(LimitKind kind);

struct LimitParams {
    int k = 4096;
    std::vector<double> x_grid; // marks for the sup kinds
    WeightFunction g = WeightFunction::named("bounded");
    DistributionPtr F;         // innovation CDF (mark covariance, q location)
    DistributionPtr f_density; // innovation density over marks
    double tau = 0.5;
    double q_tau = 0.0;
    double f_at_qtau = 0.0;

    /// Heavy-tailed driving law: S is an alpha-stable path drawn
    /// independently of the field. Otherwise S, W and s^2 come jointly from
    /// a finite-variance pre-limit at n = k built on prelimit_spec.
    bool heavy = false;
    double alpha = 2.0;
    double skew = 0.0;
    InnovationSpec prelimit_spec;

    double theta = 0.7; // MarkedSupLong fBm index
    CovModel cov_model = CovModel::PlugInIID;
    /// Only for cov_model = LongRunEstimate: innovations used by the
    /// batch-means estimate.
    std::size_t long_run_n = 1 << 16;
    SupMode sup_mode = SupMode::Signed;
};

/// Driving objects for one draw. Sup kinds over marks carry a field whose
/// columns follow params.x_grid with one extra trailing column at q_tau
/// when the kind needs W(., q).
struct PathBundle {
    PathGrid s;          // S(t) or Z_theta(t)
    FieldGrid field;     // W(t, x); empty when the kind needs no field
    bool has_field = false;
    PathGrid w_at_q;     // W(., q_tau)
    bool has_w_at_q = false;
    double s_squared = 0.0; // joint draw of sum eps_i^2 / a^2
};

/// Monte Carlo draws of one limit functional.
struct LimitEnsemble {
    std::vector<double> draws;
    long rejections = 0;
    int k = 0;
    std::string kind;
    std::string cov_model;
};

/// Precomputed per-ensemble state (mark covariance factor, effective grid).
class LimitSampler {
public:
    LimitSampler(LimitKind kind, LimitParams params);

    /// One draw; consumes the stream sequentially. Empty on a degenerate
    /// denominator (caller resamples from the same stream).
    std::optional<double> draw(RandomStream& rs) const;

    PathBundle draw_bundle(RandomStream& rs) const;
    std::optional<double> assemble(const PathBundle& bundle) const;

    LimitKind kind() const { return kind_; }
    const LimitParams& params() const { return params_; }

private:
    LimitKind kind_;
    LimitParams params_;
    bool needs_field_ = false;
    bool needs_w_at_q_ = false;
    std::vector<double> field_grid_; // x_grid (+ q_tau) for the field columns
    std::vector<double> cov_factor_; // heavy kinds: factor of the mark covariance
    std::vector<double> f_on_grid_;  // f_density over x_grid
};

/// R independent draws; replicate r uses stream (base.seed, base.stream_id + r).
/// Degenerate draws are resampled within the replicate's stream and counted.
LimitEnsemble limit_sup_statistic(LimitKind kind, const LimitParams& params,
                                  long replications, NoiseStream base,
                                  int threads = 1);

} // namespace unitmark
