#include "unitmark/io.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "unitmark/errors.hpp"

namespace unitmark {

using nlohmann::json;

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

void write_series_csv(const std::filesystem::path& path, const SeriesSample& series) {
    std::ostringstream out;
    out << "i,x,eps\n";
    out << "0," << format_double(series.x[0]) << ",\n";
    for (std::size_t i = 1; i < series.x.size(); ++i) {
        out << i << ',' << format_double(series.x[i]) << ','
            << format_double(series.eps[i - 1]) << '\n';
    }
    write_text_file(path, out.str());
}

SeriesSample read_series_csv(const std::filesystem::path& path,
                             const InnovationSpec& spec, double beta_true) {
    const std::string text = read_text_file(path);
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "i,x,eps")
        throw IoError("series csv missing 'i,x,eps' header: " + path.string());
    std::vector<double> x;
    std::vector<double> eps;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw IoError("malformed series csv row: " + line);
        const std::string xs = line.substr(c1 + 1, c2 - c1 - 1);
        const std::string es = line.substr(c2 + 1);
        try {
            x.push_back(std::stod(xs));
            if (!es.empty()) eps.push_back(std::stod(es));
        } catch (const std::exception&) {
            throw IoError("non-numeric series csv row: " + line);
        }
    }
    if (x.size() != eps.size() + 1)
        throw IoError("series csv row counts are inconsistent: " + path.string());
    SeriesSample series;
    series.x = std::move(x);
    series.eps = std::move(eps);
    series.beta_true = beta_true;
    series.spec = spec;
    series.a_n = normalizer_a_n(spec, series.n());
    return series;
}

void write_curve_csv(const std::filesystem::path& path, const MarkedCurve& curve) {
    std::ostringstream out;
    out << "x,value\n";
    for (std::size_t m = 0; m < curve.x_grid.size(); ++m) {
        out << format_double(curve.x_grid[m]) << ',' << format_double(curve.values[m])
            << '\n';
    }
    write_text_file(path, out.str());
}

void write_ensemble_csv(const std::filesystem::path& path, const LimitEnsemble& ensemble) {
    std::ostringstream out;
    out << "draw\n";
    for (const double v : ensemble.draws) out << format_double(v) << '\n';
    write_text_file(path, out.str());
}

void write_report_csv(const std::filesystem::path& path, const ComparisonReport& report) {
    std::ostringstream out;
    out << "n,level,finite_quantile,limit_quantile,ks,ks_raw,r_effective,dropped\n";
    const double levels[4] = {0.50, 0.90, 0.95, 0.99};
    for (const auto& row : report.rows) {
        const double fq[4] = {row.q50, row.q90, row.q95, row.q99};
        const double lq[4] = {report.limit_q50, report.limit_q90, report.limit_q95,
                              report.limit_q99};
        for (int l = 0; l < 4; ++l) {
            out << row.n << ',' << format_double(levels[l]) << ','
                << format_double(fq[l]) << ',' << format_double(lq[l]) << ','
                << format_double(row.ks) << ',' << format_double(row.ks_raw) << ','
                << row.r_effective << ',' << row.dropped << '\n';
        }
    }
    write_text_file(path, out.str());
}

namespace {

/// Wraps a json object; every key must be consumed or finish() throws.
class StrictObject {
public:
    StrictObject(const json& j, std::string context) : j_(j), context_(std::move(context)) {
        if (!j_.is_object()) throw ConfigError(context_ + ": expected a JSON object");
    }

    bool has(const std::string& key) {
        return j_.contains(key);
    }

    const json& require(const std::string& key) {
        if (!j_.contains(key))
            throw ConfigError(context_ + ": missing required field '" + key + "'");
        seen_.insert(key);
        return j_.at(key);
    }

    template <typename T>
    T get(const std::string& key) {
        const json& v = require(key);
        try {
            return v.get<T>();
        } catch (const json::exception&) {
            throw ConfigError(context_ + ": field '" + key + "' has the wrong type");
        }
    }

    template <typename T>
    T get_or(const std::string& key, T fallback) {
        if (!j_.contains(key)) return fallback;
        return get<T>(key);
    }

    const json* optional(const std::string& key) {
        if (!j_.contains(key)) return nullptr;
        seen_.insert(key);
        return &j_.at(key);
    }

    void finish() {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.contains(it.key()))
                throw ConfigError(context_ + ": unknown field '" + it.key() + "'");
        }
    }

private:
    const json& j_;
    std::string context_;
    std::set<std::string> seen_;
};

Family family_from(const std::string& s) {
    if (s == "stable_iid") return Family::StableIID;
    if (s == "garch11") return Family::Garch11;
    if (s == "linear_ma") return Family::LinearMA;
    throw ConfigError("spec.family: unknown value '" + s +
                      "' (expected stable_iid|garch11|linear_ma)");
}

NoiseLaw noise_from(const std::string& s) {
    if (s == "normal") return NoiseLaw::Normal;
    if (s == "student_t") return NoiseLaw::StudentT;
    if (s == "two_point") return NoiseLaw::TwoPoint;
    throw ConfigError("spec.noise: unknown value '" + s + "'");
}

SlowlyVarying sv_from(const std::string& s) {
    if (s == "one") return SlowlyVarying::One;
    if (s == "log") return SlowlyVarying::LogPlus;
    throw ConfigError("spec.slowly_varying: unknown value '" + s + "'");
}

Statistic statistic_from(const std::string& s) {
    if (s == "marked_sup") return Statistic::MarkedSup;
    if (s == "residual_sup") return Statistic::ResidualSup;
    if (s == "quantile_scaled_error") return Statistic::QuantileScaledError;
    if (s == "lse_scaled_error") return Statistic::LSEScaledError;
    if (s == "long_memory_recentered") return Statistic::LongMemoryRecentered;
    throw ConfigError("statistic: unknown value '" + s + "'");
}

EstimMethod estimator_from(const std::string& s) {
    if (s == "quantile") return EstimMethod::QuantileTau;
    if (s == "lse") return EstimMethod::LSE;
    throw ConfigError("estimator: unknown value '" + s + "'");
}

InnovationSpec parse_spec(const json& j) {
    StrictObject o(j, "spec");
    InnovationSpec spec;
    spec.family = family_from(o.get<std::string>("family"));
    spec.alpha = o.get_or<double>("alpha", spec.alpha);
    spec.skew = o.get_or<double>("skew", spec.skew);
    spec.omega = o.get_or<double>("omega", spec.omega);
    spec.a = o.get_or<double>("a", spec.a);
    spec.b = o.get_or<double>("b", spec.b);
    spec.theta = o.get_or<double>("theta", spec.theta);
    if (o.has("slowly_varying")) spec.slowly_varying = sv_from(o.get<std::string>("slowly_varying"));
    spec.truncation = o.get_or<long>("truncation", spec.truncation);
    if (o.has("noise")) spec.noise = noise_from(o.get<std::string>("noise"));
    spec.noise_df = o.get_or<double>("noise_df", spec.noise_df);
    spec.burn_in = o.get_or<long>("burn_in", spec.burn_in);
    o.finish();
    spec.validate();
    return spec;
}

json spec_to_json(const InnovationSpec& spec) {
    json j;
    j["family"] = to_string(spec.family);
    j["alpha"] = spec.alpha;
    j["skew"] = spec.skew;
    j["omega"] = spec.omega;
    j["a"] = spec.a;
    j["b"] = spec.b;
    j["theta"] = spec.theta;
    j["slowly_varying"] = to_string(spec.slowly_varying);
    j["truncation"] = spec.truncation;
    j["noise"] = to_string(spec.noise);
    j["noise_df"] = spec.noise_df;
    j["burn_in"] = spec.burn_in;
    return j;
}

json parse_root(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
}

} // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text, bool require_n_list) {
    const json root = parse_root(json_text);
    StrictObject o(root, "config");
    ExperimentConfig c;
    c.spec = parse_spec(o.require("spec"));
    if (require_n_list || o.has("n_list")) {
        c.n_list = o.get<std::vector<long>>("n_list");
    } else {
        c.n_list = {1024};
    }
    c.R = o.get<long>("R");
    c.statistic = statistic_from(o.get<std::string>("statistic"));
    if (o.has("estimator")) c.estimator = estimator_from(o.get<std::string>("estimator"));
    c.tau = o.get_or<double>("tau", c.tau);
    c.q_tau = o.get_or<double>("q_tau", c.q_tau);
    if (o.has("f_at_q_tau")) c.f_at_q_tau = o.get<double>("f_at_q_tau");
    c.g_id = o.get_or<std::string>("g_id", c.g_id);
    c.F_id = o.get_or<std::string>("F_id", c.F_id);
    c.F_scale = o.get_or<double>("F_scale", c.F_scale);
    c.F_df = o.get_or<double>("F_df", c.F_df);
    c.A = o.get_or<double>("A", c.A);
    c.grid_points = o.get_or<int>("grid_points", c.grid_points);
    c.k = o.get_or<int>("k", c.k);
    if (o.has("cov_model")) {
        const auto s = o.get<std::string>("cov_model");
        if (s == "plugin_iid") c.cov_model = CovModel::PlugInIID;
        else if (s == "long_run") c.cov_model = CovModel::LongRunEstimate;
        else throw ConfigError("cov_model: unknown value '" + s + "'");
    }
    c.base_seed = o.get_or<std::uint64_t>("base_seed", c.base_seed);
    if (o.has("sup_mode")) {
        const auto s = o.get<std::string>("sup_mode");
        if (s == "signed") c.sup_mode = SupMode::Signed;
        else if (s == "abs") c.sup_mode = SupMode::Abs;
        else throw ConfigError("sup_mode: unknown value '" + s + "'");
    }
    c.beta_true = o.get_or<double>("beta_true", c.beta_true);
    c.x0 = o.get_or<double>("x0", c.x0);
    o.finish();
    c.validate();
    return c;
}

std::string serialize_config(const ExperimentConfig& c) {
    json j;
    j["spec"] = spec_to_json(c.spec);
    j["n_list"] = c.n_list;
    j["R"] = c.R;
    j["statistic"] = to_string(c.statistic);
    j["estimator"] = to_string(c.estimator);
    j["tau"] = c.tau;
    j["q_tau"] = c.q_tau;
    if (c.f_at_q_tau.has_value()) j["f_at_q_tau"] = *c.f_at_q_tau;
    j["g_id"] = c.g_id;
    j["F_id"] = c.F_id;
    j["F_scale"] = c.F_scale;
    j["F_df"] = c.F_df;
    j["A"] = c.A;
    j["grid_points"] = c.grid_points;
    j["k"] = c.k;
    j["cov_model"] = c.cov_model == CovModel::PlugInIID ? "plugin_iid" : "long_run";
    j["base_seed"] = c.base_seed;
    j["sup_mode"] = c.sup_mode == SupMode::Signed ? "signed" : "abs";
    j["beta_true"] = c.beta_true;
    j["x0"] = c.x0;
    return j.dump();
}

std::string report_json(const ComparisonReport& report, const ExperimentConfig& config) {
    json j;
    j["config"] = json::parse(serialize_config(config));
    j["config_hash"] = report.config_hash;
    j["limit"] = {{"q50", report.limit_q50},
                  {"q90", report.limit_q90},
                  {"q95", report.limit_q95},
                  {"q99", report.limit_q99},
                  {"rejections", report.limit_rejections},
                  {"draw_count", report.limit_draw_count}};
    json rows = json::array();
    for (const auto& row : report.rows) {
        rows.push_back({{"n", row.n},
                        {"q50", row.q50},
                        {"q90", row.q90},
                        {"q95", row.q95},
                        {"q99", row.q99},
                        {"ks", row.ks},
                        {"ks_raw", row.ks_raw},
                        {"r_effective", row.r_effective},
                        {"dropped", row.dropped}});
    }
    j["rows"] = rows;
    return j.dump(2) + "\n";
}

SimulateConfig parse_simulate_config(const std::string& json_text) {
    const json root = parse_root(json_text);
    StrictObject o(root, "config");
    SimulateConfig c;
    c.spec = parse_spec(o.require("spec"));
    c.n = o.get<long>("n");
    c.count = o.get_or<long>("count", c.count);
    c.beta = o.get_or<double>("beta", c.beta);
    c.x0 = o.get_or<double>("x0", c.x0);
    c.base_seed = o.get_or<std::uint64_t>("base_seed", c.base_seed);
    o.finish();
    if (c.n < 1) throw ConfigError("n must be >= 1");
    if (c.count < 1) throw ConfigError("count must be >= 1");
    return c;
}

std::string serialize_config(const SimulateConfig& c) {
    json j;
    j["spec"] = spec_to_json(c.spec);
    j["n"] = c.n;
    j["count"] = c.count;
    j["beta"] = c.beta;
    j["x0"] = c.x0;
    j["base_seed"] = c.base_seed;
    return j.dump();
}

EstimateConfig parse_estimate_config(const std::string& json_text) {
    const json root = parse_root(json_text);
    StrictObject o(root, "config");
    EstimateConfig c;
    c.spec = parse_spec(o.require("spec"));
    if (o.has("method")) c.method = estimator_from(o.get<std::string>("method"));
    c.tau = o.get_or<double>("tau", c.tau);
    c.q_tau = o.get_or<double>("q_tau", c.q_tau);
    c.adaptive_q = o.get_or<bool>("adaptive_q", c.adaptive_q);
    c.beta_true = o.get_or<double>("beta_true", c.beta_true);
    o.finish();
    return c;
}

std::string serialize_config(const EstimateConfig& c) {
    json j;
    j["spec"] = spec_to_json(c.spec);
    j["method"] = to_string(c.method);
    j["tau"] = c.tau;
    j["q_tau"] = c.q_tau;
    j["adaptive_q"] = c.adaptive_q;
    j["beta_true"] = c.beta_true;
    return j.dump();
}

GofConfig parse_gof_config(const std::string& json_text) {
    const json root = parse_root(json_text);
    StrictObject o(root, "config");
    GofConfig g;
    ExperimentConfig& c = g.experiment;
    c.spec = parse_spec(o.require("spec"));
    c.R = o.get<long>("R");
    if (o.has("estimator")) c.estimator = estimator_from(o.get<std::string>("estimator"));
    c.tau = o.get_or<double>("tau", c.tau);
    c.q_tau = o.get_or<double>("q_tau", c.q_tau);
    if (o.has("f_at_q_tau")) c.f_at_q_tau = o.get<double>("f_at_q_tau");
    c.g_id = o.get_or<std::string>("g_id", c.g_id);
    c.F_id = o.get_or<std::string>("F_id", c.F_id);
    c.F_scale = o.get_or<double>("F_scale", c.F_scale);
    c.F_df = o.get_or<double>("F_df", c.F_df);
    c.A = o.get_or<double>("A", c.A);
    c.grid_points = o.get_or<int>("grid_points", c.grid_points);
    c.k = o.get_or<int>("k", c.k);
    c.base_seed = o.get_or<std::uint64_t>("base_seed", c.base_seed);
    c.beta_true = o.get_or<double>("beta_null", 1.0);
    if (o.has("sup_mode")) {
        const auto s = o.get<std::string>("sup_mode");
        if (s == "signed") c.sup_mode = SupMode::Signed;
        else if (s == "abs") c.sup_mode = SupMode::Abs;
        else throw ConfigError("sup_mode: unknown value '" + s + "'");
    }
    c.statistic = is_long_memory(c.spec) ? Statistic::LongMemoryRecentered
                                         : Statistic::ResidualSup;
    c.n_list = {1024}; // placeholder; the statistic is computed on the input series
    if (const json* cv = o.optional("critical_values")) {
        g.critical_values = cv->get<std::vector<double>>();
        if (g.critical_values.size() != 3)
            throw ConfigError("critical_values must hold exactly 3 values (90/95/99)");
    }
    o.finish();
    return g;
}

std::string serialize_config(const GofConfig& g) {
    json j = json::parse(serialize_config(g.experiment));
    if (!g.critical_values.empty()) j["critical_values"] = g.critical_values;
    return j.dump();
}

} // namespace unitmark
