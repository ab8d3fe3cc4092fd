#include "unitmark/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "unitmark/errors.hpp"
#include "unitmark/io.hpp"
#include "unitmark/marked.hpp"
#include "unitmark/parallel.hpp"
#include "unitmark/series.hpp"

namespace unitmark {

std::string to_string(Statistic s) {
    switch (s) {
        case Statistic::MarkedSup: return "marked_sup";
        case Statistic::ResidualSup: return "residual_sup";
        case Statistic::QuantileScaledError: return "quantile_scaled_error";
        case Statistic::LSEScaledError: return "lse_scaled_error";
        case Statistic::LongMemoryRecentered: return "long_memory_recentered";
    }
    return "?";
}

void ExperimentConfig::validate() const {
    spec.validate();
    if (R < 100) throw ConfigError("R must be >= 100");
    if (n_list.empty()) throw ConfigError("n_list must be nonempty");
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        if (n_list[i] < 8) throw ConfigError("sample sizes must be >= 8");
        if (i > 0 && n_list[i] < n_list[i - 1])
            throw ConfigError("n_list must be ascending");
    }
    if (!(tau > 0.0 && tau < 1.0)) throw ConfigError("tau must lie in (0, 1)");
    if (grid_points < 2) throw ConfigError("grid_points must be >= 2");
    if (!(A > 0.0)) throw ConfigError("A must be > 0");
    if (k < 16) throw ConfigError("k must be >= 16");
}

double empirical_quantile(std::vector<double> samples, double q) {
    if (samples.empty()) throw ConfigError("empirical_quantile: empty sample");
    if (!(q > 0.0 && q < 1.0)) throw ConfigError("empirical_quantile: q must lie in (0,1)");
    std::sort(samples.begin(), samples.end());
    const std::size_t k = static_cast<std::size_t>(
        std::ceil(q * static_cast<double>(samples.size())));
    return samples[std::max<std::size_t>(k, 1) - 1];
}

double two_sample_ks(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw ConfigError("two_sample_ks: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na -
                                 static_cast<double>(j) / nb));
    }
    return d;
}

namespace {

double midpoint_median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size();
    return m % 2 == 1 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

std::vector<double> studentize(const std::vector<double>& v) {
    const double med = midpoint_median(v);
    const double iqr = empirical_quantile(v, 0.75) - empirical_quantile(v, 0.25);
    if (!(iqr > 1e-12 * (1.0 + std::abs(med)))) return v; // degenerate scale
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - med) / iqr;
    return out;
}

} // namespace

double studentized_ks(const std::vector<double>& a, const std::vector<double>& b) {
    return two_sample_ks(studentize(a), studentize(b));
}

DistributionPtr resolve_reference_cdf(const ExperimentConfig& config) {
    const std::size_t n_max = static_cast<std::size_t>(config.n_list.back());
    if (config.F_id == "auto") return make_family_cdf(config.spec, n_max);
    if (config.F_id == "normal") return make_normal(config.F_scale);
    if (config.F_id == "student_t") return make_student_t(config.F_df, config.F_scale);
    if (config.F_id == "two_point") return make_two_point(config.F_scale);
    if (config.F_id == "stable") {
        if (config.spec.family != Family::StableIID)
            throw ConfigError("F_id=stable needs a stable_iid spec for (alpha, skew)");
        return make_stable_table(config.spec.alpha, config.spec.skew);
    }
    throw ConfigError("unknown F_id: " + config.F_id);
}

LimitKind limit_kind_for(const ExperimentConfig& config) {
    const bool lm = is_long_memory(config.spec);
    switch (config.statistic) {
        case Statistic::MarkedSup:
            return lm ? LimitKind::MarkedSupLong : LimitKind::MarkedSupShort;
        case Statistic::ResidualSup:
            if (lm)
                throw ConfigError(
                    "residual_sup has no long-memory limit here; use "
                    "long_memory_recentered");
            if (config.estimator == EstimMethod::QuantileTau)
                return LimitKind::ResidualSupQuantile;
            return is_infinite_variance(config.spec) ? LimitKind::ResidualSupLseHeavy
                                                     : LimitKind::ResidualSupLseRootN;
        case Statistic::QuantileScaledError:
            if (lm) throw ConfigError("quantile_scaled_error requires short memory");
            return LimitKind::QuantileError;
        case Statistic::LSEScaledError:
            return LimitKind::LseError;
        case Statistic::LongMemoryRecentered:
            if (!lm) throw ConfigError("long_memory_recentered requires a long-memory spec");
            return LimitKind::MarkedSupLong;
    }
    throw ConfigError("unknown statistic");
}

namespace {

bool statistic_needs_density(const ExperimentConfig& config) {
    switch (limit_kind_for(config)) {
        case LimitKind::MarkedSupLong:
        case LimitKind::ResidualSupQuantile:
        case LimitKind::ResidualSupLseHeavy:
        case LimitKind::ResidualSupLseRootN:
            return true;
        default:
            return config.statistic == Statistic::LongMemoryRecentered;
    }
}

} // namespace

LimitParams limit_params_for(const ExperimentConfig& config) {
    config.validate();
    LimitParams p;
    p.k = config.k;
    p.x_grid = make_mark_grid(config.A, config.grid_points);
    p.g = WeightFunction::named(config.g_id);
    p.F = resolve_reference_cdf(config);
    p.f_density = statistic_needs_density(config) ? p.F : nullptr;
    p.tau = config.tau;
    p.q_tau = config.q_tau;
    const LimitKind kind = limit_kind_for(config);
    if (kind == LimitKind::QuantileError || kind == LimitKind::ResidualSupQuantile) {
        p.f_at_qtau = config.f_at_q_tau.value_or(p.F->pdf(config.q_tau));
    }
    p.heavy = !is_long_memory(config.spec) && is_infinite_variance(config.spec);
    if (config.spec.family == Family::StableIID) {
        p.alpha = config.spec.alpha;
        p.skew = config.spec.skew;
    } else if (config.spec.family == Family::Garch11) {
        p.alpha = std::min(2.0, kesten_index(config.spec));
        p.skew = 0.0; // symmetric eta gives symmetric GARCH tails
    }
    p.prelimit_spec = config.spec;
    p.theta = config.spec.theta;
    p.cov_model = config.cov_model;
    p.sup_mode = config.sup_mode;
    return p;
}

std::optional<double> statistic_on_series(const ExperimentConfig& config,
                                          const SeriesSample& series,
                                          const Distribution& F,
                                          const DistributionPtr& f_density,
                                          const WeightFunction& g,
                                          const std::vector<double>& grid) {
    try {
        switch (config.statistic) {
            case Statistic::MarkedSup: {
                const auto curve = marked_empirical(series, g, F, grid);
                return sup_functional(curve, config.sup_mode);
            }
            case Statistic::ResidualSup: {
                const auto est = config.estimator == EstimMethod::QuantileTau
                                     ? quantile_estimate(series, config.tau, config.q_tau)
                                     : lse_estimate(series);
                const auto curve =
                    residual_marked_empirical(series, est.beta_hat, g, F, grid);
                return sup_functional(curve, config.sup_mode);
            }
            case Statistic::QuantileScaledError:
                return quantile_estimate(series, config.tau, config.q_tau).scaled_error;
            case Statistic::LSEScaledError:
                return lse_estimate(series).scaled_error;
            case Statistic::LongMemoryRecentered: {
                const auto est = lse_estimate(series);
                const auto curve = recentered_residual_statistic(
                    series, est.beta_hat, g, F, *f_density, grid);
                return sup_functional(curve, config.sup_mode);
            }
        }
    } catch (const UnidentifiedError&) {
        return std::nullopt;
    }
    throw ConfigError("unknown statistic");
}

std::optional<double> finite_statistic_draw(const ExperimentConfig& config,
                                            const Distribution& F,
                                            const DistributionPtr& f_density,
                                            const WeightFunction& g,
                                            const std::vector<double>& grid, long n,
                                            NoiseStream stream) {
    const auto series = simulate_series(config.spec, static_cast<std::size_t>(n),
                                        config.beta_true, config.x0, stream);
    return statistic_on_series(config, series, F, f_density, g, grid);
}

ComparisonReport run_experiment(const ExperimentConfig& config, int threads) {
    config.validate();
    const auto t0 = std::chrono::steady_clock::now();

    const auto grid = make_mark_grid(config.A, config.grid_points);
    const auto g = WeightFunction::named(config.g_id);
    const auto F = resolve_reference_cdf(config);
    const DistributionPtr f_density = statistic_needs_density(config) ? F : nullptr;
    const LimitKind kind = limit_kind_for(config);
    const auto limit_params = limit_params_for(config);

    ComparisonReport report;
    report.config_hash = fnv1a(serialize_config(config));

    const long m_count = static_cast<long>(config.n_list.size());
    for (long m = 0; m < m_count; ++m) {
        const long n = config.n_list[static_cast<std::size_t>(m)];
        std::vector<double> draws(static_cast<std::size_t>(config.R),
                                  std::numeric_limits<double>::quiet_NaN());
        parallel_for(0, config.R, threads, [&](long r) {
            const NoiseStream stream{config.base_seed,
                                     static_cast<std::uint64_t>(m * config.R + r)};
            const auto v =
                finite_statistic_draw(config, *F, f_density, g, grid, n, stream);
            if (v.has_value()) draws[static_cast<std::size_t>(r)] = *v;
        });
        std::vector<double> kept;
        kept.reserve(draws.size());
        for (const double v : draws) {
            if (!std::isnan(v)) kept.push_back(v);
        }
        ReportRow row;
        row.n = n;
        row.dropped = config.R - static_cast<long>(kept.size());
        row.r_effective = static_cast<long>(kept.size());
        if (kept.empty()) throw NumericalError("all replicates dropped at n = " +
                                               std::to_string(n));
        row.q50 = empirical_quantile(kept, 0.50);
        row.q90 = empirical_quantile(kept, 0.90);
        row.q95 = empirical_quantile(kept, 0.95);
        row.q99 = empirical_quantile(kept, 0.99);
        report.rows.push_back(row);
        report.finite_draws.push_back(std::move(kept));
    }

    // One shared limit ensemble for the whole experiment.
    const NoiseStream limit_base{config.base_seed,
                                 static_cast<std::uint64_t>(m_count * config.R)};
    auto ensemble = limit_sup_statistic(kind, limit_params, config.R, limit_base, threads);
    report.limit_draw_count = static_cast<long>(ensemble.draws.size());
    report.limit_rejections = ensemble.rejections;
    report.limit_q50 = empirical_quantile(ensemble.draws, 0.50);
    report.limit_q90 = empirical_quantile(ensemble.draws, 0.90);
    report.limit_q95 = empirical_quantile(ensemble.draws, 0.95);
    report.limit_q99 = empirical_quantile(ensemble.draws, 0.99);
    report.limit_draws = std::move(ensemble.draws);

    for (std::size_t m = 0; m < report.rows.size(); ++m) {
        report.rows[m].ks = studentized_ks(report.finite_draws[m], report.limit_draws);
        report.rows[m].ks_raw = two_sample_ks(report.finite_draws[m], report.limit_draws);
    }

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

ConvergenceTable convergence_table(const ComparisonReport& report) {
    if (report.rows.size() < 3)
        throw ConfigError("convergence table needs at least 3 sample sizes");
    ConvergenceTable table;
    for (const auto& row : report.rows) {
        table.rows.push_back({row.n, row.ks, row.ks_raw});
    }
    const std::size_t m = table.rows.size();
    table.trend_decreasing = table.rows[m - 1].ks <= table.rows[m - 2].ks &&
                             table.rows[m - 2].ks <= table.rows[m - 3].ks;
    return table;
}

ConvergenceTable convergence_study(const ExperimentConfig& config, int threads) {
    if (config.n_list.size() < 3)
        throw ConfigError("convergence_study needs at least 3 sample sizes");
    return convergence_table(run_experiment(config, threads));
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (const unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace unitmark
