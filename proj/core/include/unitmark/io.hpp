#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "unitmark/harness.hpp"
#include "unitmark/marked.hpp"
#include "unitmark/series.hpp"

namespace unitmark {

/// 17 significant digits; round-trips any double.
std::string format_double(double v);

/// Columns: i, x, eps (eps empty at i = 0). Header row + n + 1 data rows.
void write_series_csv(const std::filesystem::path& path, const SeriesSample& series);

/// Reads back a series CSV; spec/beta provide the provenance the CSV does
/// not carry (a_n is recomputed from the spec).
SeriesSample read_series_csv(const std::filesystem::path& path,
                             const InnovationSpec& spec, double beta_true);

/// Columns: x, value.
void write_curve_csv(const std::filesystem::path& path, const MarkedCurve& curve);

/// Column: draw.
void write_ensemble_csv(const std::filesystem::path& path, const LimitEnsemble& ensemble);

/// One row per (n, level in {50, 90, 95, 99}).
void write_report_csv(const std::filesystem::path& path, const ComparisonReport& report);

/// Deterministic JSON summary (config echo + hash, per-n KS, quantiles,
/// rejection counts). Wall time is intentionally excluded.
std::string report_json(const ComparisonReport& report, const ExperimentConfig& config);

/// Canonical JSON text of a config; hashing this stamps every output.
std::string serialize_config(const ExperimentConfig& config);

/// Strict parsers: unknown keys are a hard ConfigError naming the key.
ExperimentConfig parse_experiment_config(const std::string& json_text,
                                         bool require_n_list = true);

struct SimulateConfig {
    InnovationSpec spec;
    long n = 1024;
    long count = 1;
    double beta = 1.0;
    double x0 = 0.0;
    std::uint64_t base_seed = 20240101;
};
SimulateConfig parse_simulate_config(const std::string& json_text);
std::string serialize_config(const SimulateConfig& config);

struct EstimateConfig {
    InnovationSpec spec;
    EstimMethod method = EstimMethod::LSE;
    double tau = 0.5;
    double q_tau = 0.0;
    bool adaptive_q = false; // estimate q_tau by alternation
    double beta_true = 1.0;
};
EstimateConfig parse_estimate_config(const std::string& json_text);
std::string serialize_config(const EstimateConfig& config);

struct GofConfig {
    ExperimentConfig experiment; // statistic/estimator resolved for testing
    /// Optional precomputed critical values at levels {0.90, 0.95, 0.99}.
    std::vector<double> critical_values;
};
GofConfig parse_gof_config(const std::string& json_text);
std::string serialize_config(const GofConfig& config);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

} // namespace unitmark
