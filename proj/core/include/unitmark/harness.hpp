#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "unitmark/estimators.hpp"
#include "unitmark/limits.hpp"

namespace unitmark {

enum class Statistic {
    MarkedSup,
    ResidualSup,
    QuantileScaledError,
    LSEScaledError,
    LongMemoryRecentered
};

std::string to_string(Statistic s);

/// Full description of a replication study: finite-n statistic draws per
/// sample size against one shared limit-law ensemble.
struct ExperimentConfig {
    InnovationSpec spec;
    std::vector<long> n_list;
    long R = 200;
    Statistic statistic = Statistic::LSEScaledError;
    EstimMethod estimator = EstimMethod::LSE;
    double tau = 0.5;
    double q_tau = 0.0;
    std::optional<double> f_at_q_tau; // else the F density at q_tau
    std::string g_id = "bounded";
    std::string F_id = "auto"; // auto|normal|student_t|two_point|stable
    double F_scale = 1.0;
    double F_df = 4.0;
    double A = 3.0;
    int grid_points = 241;
    int k = 4096;
    CovModel cov_model = CovModel::PlugInIID;
    std::uint64_t base_seed = 20240101;
    SupMode sup_mode = SupMode::Signed;
    double beta_true = 1.0;
    double x0 = 0.0;

    void validate() const;
};

struct ReportRow {
    long n = 0;
    double q50 = 0, q90 = 0, q95 = 0, q99 = 0;
    /// Two-sample KS after per-sample studentization (median/IQR); the
    /// harness's canonical comparison, insensitive to the absorbed a_n
    /// constants.
    double ks = 0;
    /// Same statistic on the raw draws.
    double ks_raw = 0;
    long dropped = 0;
    long r_effective = 0;
};

struct ComparisonReport {
    std::vector<ReportRow> rows;
    double limit_q50 = 0, limit_q90 = 0, limit_q95 = 0, limit_q99 = 0;
    long limit_rejections = 0;
    long limit_draw_count = 0; // the shared ensemble is drawn exactly once
    std::vector<std::vector<double>> finite_draws; // per n, dropped removed
    std::vector<double> limit_draws;
    double wall_seconds = 0; // diagnostics only; never serialized
    std::uint64_t config_hash = 0;
};

/// k-th order statistic with k = ceil(q * size) (1-indexed).
double empirical_quantile(std::vector<double> samples, double q);

/// Exact two-sample Kolmogorov-Smirnov distance sup |ECDF_a - ECDF_b|.
double two_sample_ks(std::vector<double> a, std::vector<double> b);

/// (x - median) / IQR per sample; identity when either IQR degenerates.
double studentized_ks(const std::vector<double>& a, const std::vector<double>& b);

/// The limit functional matched to a statistic under the spec's regime
/// (long memory / infinite variance / estimator). Throws ConfigError for
/// unsupported combinations.
LimitKind limit_kind_for(const ExperimentConfig& config);

/// Builds the limit-ensemble parameters implied by an experiment config.
LimitParams limit_params_for(const ExperimentConfig& config);

/// The configured statistic evaluated on one realized series; empty when the
/// estimator is unidentified.
std::optional<double> statistic_on_series(const ExperimentConfig& config,
                                          const SeriesSample& series,
                                          const Distribution& F,
                                          const DistributionPtr& f_density,
                                          const WeightFunction& g,
                                          const std::vector<double>& grid);

/// One finite-n statistic draw; empty when the estimator is unidentified.
std::optional<double> finite_statistic_draw(const ExperimentConfig& config,
                                            const Distribution& F,
                                            const DistributionPtr& f_density,
                                            const WeightFunction& g,
                                            const std::vector<double>& grid, long n,
                                            NoiseStream stream);

/// F implied by the config (F_id or, for "auto", the family CDF).
DistributionPtr resolve_reference_cdf(const ExperimentConfig& config);

/// Runs the full study: for each n, R replicates (stream_id = m*R + r), one
/// shared limit ensemble (stream_id = |n_list|*R + r), deterministic report.
ComparisonReport run_experiment(const ExperimentConfig& config, int threads = 1);

struct ConvergenceRow {
    long n = 0;
    double ks = 0;
    double ks_raw = 0;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    /// KS decreasing over at least the last two steps of n_list.
    bool trend_decreasing = false;
};

/// KS-versus-n rows extracted from a finished report (|n_list| >= 3).
ConvergenceTable convergence_table(const ComparisonReport& report);

/// KS-versus-n table from a full experiment run (|n_list| >= 3).
ConvergenceTable convergence_study(const ExperimentConfig& config, int threads = 1);

/// FNV-1a over the canonical serialized config (io.hpp); stamps outputs.
std::uint64_t fnv1a(const std::string& bytes);

} // namespace unitmark
