// Command-line front end: simulate / estimate / gof-test / limit-mc /
// convergence-study. Exit codes: 0 success, 2 config or usage error,
// 3 I/O error, 4 numerical failure.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "unitmark/errors.hpp"
#include "unitmark/harness.hpp"
#include "unitmark/io.hpp"
#include "unitmark/marked.hpp"
#include "unitmark/parallel.hpp"
#include "unitmark/series.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace unitmark;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed_override;
    int threads = 0;
    bool verbose = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "JSON config file")->required();
    cmd->add_option("--out", opts.out_dir, "output directory")->required();
    cmd->add_option("--seed", opts.seed_override, "override the config base_seed");
    cmd->add_option("--threads", opts.threads, "worker threads (0 = hardware)");
    cmd->add_flag("--verbose", opts.verbose, "progress and timing on stderr");
}

int worker_count(const CommonOpts& opts) {
    return opts.threads > 0 ? opts.threads : default_threads();
}

fs::path prepare_out_dir(const CommonOpts& opts) {
    fs::path dir(opts.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw IoError("output directory is not writable: " + dir.string());
    return dir;
}

std::string load_config_text(const CommonOpts& opts) {
    if (!fs::exists(opts.config_path))
        throw ConfigError("config file does not exist: " + opts.config_path);
    return read_text_file(opts.config_path);
}

void log_verbose(const CommonOpts& opts, const std::string& msg) {
    if (opts.verbose) std::cerr << "[unitmark] " << msg << "\n";
}

int run_simulate(const CommonOpts& opts) {
    auto cfg = parse_simulate_config(load_config_text(opts));
    if (opts.seed_override) cfg.base_seed = *opts.seed_override;
    const fs::path dir = prepare_out_dir(opts);

    json meta;
    meta["config"] = json::parse(serialize_config(cfg));
    meta["config_hash"] = fnv1a(serialize_config(cfg));
    json files = json::array();
    std::vector<SeriesSample> all(static_cast<std::size_t>(cfg.count));
    parallel_for(0, cfg.count, worker_count(opts), [&](long r) {
        all[static_cast<std::size_t>(r)] =
            simulate_series(cfg.spec, static_cast<std::size_t>(cfg.n), cfg.beta, cfg.x0,
                            NoiseStream{cfg.base_seed, static_cast<std::uint64_t>(r)});
    });
    for (long r = 0; r < cfg.count; ++r) {
        char name[32];
        std::snprintf(name, sizeof(name), "series_%04ld.csv", r);
        const auto& series = all[static_cast<std::size_t>(r)];
        write_series_csv(dir / name, series);
        files.push_back({{"file", name},
                         {"stream_id", r},
                         {"a_n", series.a_n},
                         {"truncation_tail_mass", series.truncation_tail_mass},
                         {"stationarity_warning", series.stationarity_warning}});
    }
    meta["series"] = files;
    write_text_file(dir / "simulate_meta.json", meta.dump(2) + "\n");
    log_verbose(opts, "wrote " + std::to_string(cfg.count) + " series to " + dir.string());
    return 0;
}

int run_estimate(const CommonOpts& opts, const std::vector<std::string>& series_paths) {
    const auto cfg = parse_estimate_config(load_config_text(opts));
    const fs::path dir = prepare_out_dir(opts);
    if (series_paths.empty()) throw ConfigError("estimate needs at least one --series file");

    json out;
    out["config"] = json::parse(serialize_config(cfg));
    out["config_hash"] = fnv1a(serialize_config(cfg));
    json results = json::array();
    for (const auto& path : series_paths) {
        const auto series = read_series_csv(path, cfg.spec, cfg.beta_true);
        EstimateResult est;
        if (cfg.method == EstimMethod::QuantileTau) {
            est = cfg.adaptive_q ? quantile_estimate_adaptive(series, cfg.tau)
                                 : quantile_estimate(series, cfg.tau, cfg.q_tau);
        } else {
            est = lse_estimate(series);
        }
        results.push_back({{"file", fs::path(path).filename().string()},
                           {"method", to_string(est.method)},
                           {"beta_hat", est.beta_hat},
                           {"scaled_error", est.scaled_error},
                           {"objective_at_min", est.objective_at_min},
                           {"interval_lo", est.interval_lo},
                           {"interval_hi", est.interval_hi},
                           {"subgradient_left", est.subgradient_left},
                           {"subgradient_right", est.subgradient_right},
                           {"dropped_terms", est.dropped_terms},
                           {"q_tau", est.q_tau},
                           {"iterations", est.iterations}});
    }
    out["estimates"] = results;
    write_text_file(dir / "estimates.json", out.dump(2) + "\n");
    return 0;
}

int run_gof(const CommonOpts& opts, const std::vector<std::string>& series_paths) {
    auto cfg = parse_gof_config(load_config_text(opts));
    if (opts.seed_override) cfg.experiment.base_seed = *opts.seed_override;
    const fs::path dir = prepare_out_dir(opts);
    if (series_paths.empty()) throw ConfigError("gof-test needs at least one --series file");

    const ExperimentConfig& e = cfg.experiment;
    const auto grid = make_mark_grid(e.A, e.grid_points);
    const auto g = WeightFunction::named(e.g_id);
    const auto F = resolve_reference_cdf(e);
    const LimitKind kind = limit_kind_for(e);
    const DistributionPtr f_density = F;

    std::vector<double> critvals = cfg.critical_values;
    long rejections_meta = 0;
    if (critvals.empty()) {
        log_verbose(opts, "drawing limit ensemble (R = " + std::to_string(e.R) + ")");
        const auto params = limit_params_for(e);
        const auto ensemble = limit_sup_statistic(kind, params, e.R,
                                                  NoiseStream{e.base_seed, 0},
                                                  worker_count(opts));
        critvals = {empirical_quantile(ensemble.draws, 0.90),
                    empirical_quantile(ensemble.draws, 0.95),
                    empirical_quantile(ensemble.draws, 0.99)};
        rejections_meta = ensemble.rejections;
    }

    json out;
    out["config"] = json::parse(serialize_config(cfg));
    out["config_hash"] = fnv1a(serialize_config(cfg));
    out["critical_values"] = {{"0.90", critvals[0]},
                              {"0.95", critvals[1]},
                              {"0.99", critvals[2]}};
    out["ensemble_rejections"] = rejections_meta;
    json decisions = json::array();
    for (const auto& path : series_paths) {
        const auto series = read_series_csv(path, e.spec, e.beta_true);
        const auto stat = statistic_on_series(e, series, *F, f_density, g, grid);
        if (!stat.has_value())
            throw NumericalError("estimator unidentified on " + path);
        decisions.push_back({{"file", fs::path(path).filename().string()},
                             {"statistic", *stat},
                             {"reject_0.90", *stat > critvals[0]},
                             {"reject_0.95", *stat > critvals[1]},
                             {"reject_0.99", *stat > critvals[2]}});
    }
    out["decisions"] = decisions;
    write_text_file(dir / "gof_result.json", out.dump(2) + "\n");
    return 0;
}

int run_limit_mc(const CommonOpts& opts) {
    auto cfg = parse_experiment_config(load_config_text(opts), /*require_n_list=*/false);
    if (opts.seed_override) cfg.base_seed = *opts.seed_override;
    const fs::path dir = prepare_out_dir(opts);

    const LimitKind kind = limit_kind_for(cfg);
    const auto params = limit_params_for(cfg);
    const auto ensemble = limit_sup_statistic(kind, params, cfg.R,
                                              NoiseStream{cfg.base_seed, 0},
                                              worker_count(opts));
    write_ensemble_csv(dir / "ensemble.csv", ensemble);
    json meta;
    meta["config"] = json::parse(serialize_config(cfg));
    meta["config_hash"] = fnv1a(serialize_config(cfg));
    meta["kind"] = ensemble.kind;
    meta["k"] = ensemble.k;
    meta["cov_model"] = ensemble.cov_model;
    meta["rejections"] = ensemble.rejections;
    meta["draws"] = ensemble.draws.size();
    meta["q50"] = empirical_quantile(ensemble.draws, 0.50);
    meta["q90"] = empirical_quantile(ensemble.draws, 0.90);
    meta["q95"] = empirical_quantile(ensemble.draws, 0.95);
    meta["q99"] = empirical_quantile(ensemble.draws, 0.99);
    write_text_file(dir / "ensemble_meta.json", meta.dump(2) + "\n");
    return 0;
}

int run_convergence(const CommonOpts& opts) {
    auto cfg = parse_experiment_config(load_config_text(opts));
    if (opts.seed_override) cfg.base_seed = *opts.seed_override;
    if (cfg.n_list.size() < 3)
        throw ConfigError("convergence-study needs |n_list| >= 3");
    const fs::path dir = prepare_out_dir(opts);

    const auto t0 = std::chrono::steady_clock::now();
    const auto report = run_experiment(cfg, worker_count(opts));
    const auto table = convergence_table(report);
    log_verbose(opts, "experiment finished in " +
                          std::to_string(std::chrono::duration<double>(
                                             std::chrono::steady_clock::now() - t0)
                                             .count()) +
                          " s");

    write_report_csv(dir / "report.csv", report);
    json j = json::parse(report_json(report, cfg));
    j["trend_decreasing"] = table.trend_decreasing;
    write_text_file(dir / "report.json", j.dump(2) + "\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"unit-root marked empirical process toolkit"};
    app.require_subcommand(1);

    CommonOpts sim_opts, est_opts, gof_opts, mc_opts, conv_opts;
    std::vector<std::string> est_series, gof_series;

    auto* sim = app.add_subcommand("simulate", "sample innovation series to CSV");
    add_common(sim, sim_opts);

    auto* est = app.add_subcommand("estimate", "quantile / least-squares estimates");
    add_common(est, est_opts);
    est->add_option("--series", est_series, "series CSV file(s)")->required();

    auto* gof = app.add_subcommand("gof-test", "goodness-of-fit test for beta = 1");
    add_common(gof, gof_opts);
    gof->add_option("--series", gof_series, "series CSV file(s)")->required();

    auto* mc = app.add_subcommand("limit-mc", "Monte Carlo draws of a limit law");
    add_common(mc, mc_opts);

    auto* conv = app.add_subcommand("convergence-study",
                                    "finite-n versus limit comparison across n");
    add_common(conv, conv_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e); // prints usage, exit 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (sim->parsed()) return run_simulate(sim_opts);
        if (est->parsed()) return run_estimate(est_opts, est_series);
        if (gof->parsed()) return run_gof(gof_opts, gof_series);
        if (mc->parsed()) return run_limit_mc(mc_opts);
        if (conv->parsed()) return run_convergence(conv_opts);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const UnidentifiedError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 4;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
