#include "unitmark/limits.hpp"

#include <algorithm>
#include <cmath>

#include "unitmark/errors.hpp"
#include "unitmark/parallel.hpp"
#include "unitmark/series.hpp"

namespace unitmark {

std::string to_string(LimitKind kind) {
    switch (kind) {
        case LimitKind::MarkedSupShort: return "marked_sup_short";
        case LimitKind::MarkedSupLong: return "marked_sup_long";
        case LimitKind::ResidualSupQuantile: return "residual_sup_quantile";
        case LimitKind::ResidualSupLseHeavy: return "residual_sup_lse_heavy";
        case LimitKind::ResidualSupLseRootN: return "residual_sup_lse_rootn";
        case LimitKind::QuantileError: return "quantile_error";
        case LimitKind::LseError: return "lse_error";
    }
    return "?";
}

namespace {

bool kind_needs_field(LimitKind kind) {
    switch (kind) {
        case LimitKind::MarkedSupShort:
        case LimitKind::ResidualSupQuantile:
        case LimitKind::ResidualSupLseRootN:
            return true;
        default:
            return false;
    }
}

bool kind_needs_w_at_q(LimitKind kind) {
    return kind == LimitKind::ResidualSupQuantile || kind == LimitKind::QuantileError;
}

bool kind_needs_marks(LimitKind kind) {
    switch (kind) {
        case LimitKind::QuantileError:
        case LimitKind::LseError:
            return false;
        default:
            return true;
    }
}

bool kind_needs_density(LimitKind kind) {
    switch (kind) {
        case LimitKind::MarkedSupLong:
        case LimitKind::ResidualSupQuantile:
        case LimitKind::ResidualSupLseHeavy:
        case LimitKind::ResidualSupLseRootN:
            return true;
        default:
            return false;
    }
}

double sup_over(const std::vector<double>& values, SupMode mode) {
    double best = mode == SupMode::Signed ? values.front() : std::abs(values.front());
    for (const double v : values) {
        best = std::max(best, mode == SupMode::Signed ? v : std::abs(v));
    }
    return best;
}

} // namespace

LimitSampler::LimitSampler(LimitKind kind, LimitParams params)
    : kind_(kind), params_(std::move(params)) {
    needs_field_ = kind_needs_field(kind_);
    needs_w_at_q_ = kind_needs_w_at_q(kind_);
    if (params_.k < 16) throw ConfigError("limit ensemble needs k >= 16");
    if (kind_needs_marks(kind_) && params_.x_grid.size() < 2)
        throw ConfigError("limit ensemble needs a mark grid with >= 2 points");
    if (kind_needs_density(kind_)) {
        if (!params_.f_density)
            throw ConfigError("limit kind " + to_string(kind_) +
                              " requires a density evaluator");
        f_on_grid_.resize(params_.x_grid.size());
        for (std::size_t m = 0; m < params_.x_grid.size(); ++m) {
            f_on_grid_[m] = params_.f_density->pdf(params_.x_grid[m]);
        }
    }
    if (kind_ == LimitKind::ResidualSupQuantile || kind_ == LimitKind::QuantileError) {
        if (!(params_.f_at_qtau > 0.0))
            throw ConfigError("quantile limit kinds require f_at_qtau > 0");
    }
    if ((needs_field_ || needs_w_at_q_) && !params_.heavy) {
        // Joint pre-limit indicator sums need the CDF for centering.
        if (!params_.F) throw ConfigError("pre-limit field requires the innovation CDF F");
    }

    if (kind_ != LimitKind::MarkedSupLong && !params_.heavy) {
        params_.prelimit_spec.validate();
        // A long-memory pre-limit is fine for pure path functionals (the
        // indicator field has no sqrt(k) limit under long memory).
        if ((needs_field_ || needs_w_at_q_) && is_long_memory(params_.prelimit_spec))
            throw ConfigError("field-driven pre-limit requires a short-memory spec");
    }

    field_grid_ = params_.x_grid;
    if (needs_w_at_q_) field_grid_.push_back(params_.q_tau);

    if (params_.heavy && (needs_field_ || needs_w_at_q_)) {
        if (!params_.F) throw ConfigError("heavy field kinds require the innovation CDF F");
        MarkCovariance cov;
        if (params_.cov_model == CovModel::PlugInIID) {
            cov = plug_in_iid_cov(*params_.F, field_grid_);
        } else {
            cov = estimate_long_run_cov(params_.prelimit_spec, *params_.F, field_grid_,
                                        params_.long_run_n,
                                        NoiseStream{0x6c6f6e6772756eULL, 0});
        }
        cov_factor_ = factor_mark_covariance(cov);
    }
}

PathBundle LimitSampler::draw_bundle(RandomStream& rs) const {
    PathBundle bundle;
    const int k = params_.k;
    const std::size_t m = field_grid_.size();

    if (kind_ == LimitKind::MarkedSupLong) {
        bundle.s = simulate_fbm(params_.theta, k, rs);
        return bundle;
    }

    if (params_.heavy) {
        // Stable path and its squared-increment companion from the same
        // draws; the field, when needed, is independent of both.
        bundle.s.k = k;
        bundle.s.values.assign(static_cast<std::size_t>(k) + 1, 0.0);
        const double scale = std::pow(static_cast<double>(k), -1.0 / params_.alpha);
        double acc = 0.0;
        double sq = 0.0;
        for (int j = 1; j <= k; ++j) {
            const double z = stable_draw(params_.alpha, params_.skew, rs);
            acc += z;
            sq += z * z;
            bundle.s.values[static_cast<std::size_t>(j)] = acc * scale;
        }
        bundle.s_squared = sq * scale * scale;
        if (needs_field_ || needs_w_at_q_) {
            bundle.field = simulate_mark_field_factored(k, field_grid_, cov_factor_, rs);
            bundle.has_field = true;
        }
    } else {
        // Finite-variance joint pre-limit at n = k: S, W and s^2 from one
        // innovation stream, preserving their dependence.
        const auto sample = sample_innovations(params_.prelimit_spec,
                                               static_cast<std::size_t>(k), rs);
        const double a_k = normalizer_a_n(params_.prelimit_spec,
                                          static_cast<std::size_t>(k));
        bundle.s.k = k;
        bundle.s.values.assign(static_cast<std::size_t>(k) + 1, 0.0);
        double acc = 0.0;
        double sq = 0.0;
        for (int j = 1; j <= k; ++j) {
            const double e = sample.eps[static_cast<std::size_t>(j - 1)];
            acc += e;
            sq += e * e;
            bundle.s.values[static_cast<std::size_t>(j)] = acc / a_k;
        }
        bundle.s_squared = sq / (a_k * a_k);
        if (needs_field_ || needs_w_at_q_) {
            bundle.field.k = k;
            bundle.field.x_grid = field_grid_;
            bundle.field.w.assign(static_cast<std::size_t>(k + 1) * m, 0.0);
            std::vector<double> p(m);
            for (std::size_t c = 0; c < m; ++c) p[c] = params_.F->cdf(field_grid_[c]);
            const double root_k = std::sqrt(static_cast<double>(k));
            // field_grid_ is ascending except possibly the trailing q column;
            // handle columns independently via per-column thresholds.
            for (int j = 1; j <= k; ++j) {
                const double e = sample.eps[static_cast<std::size_t>(j - 1)];
                double* row = bundle.field.w.data() + static_cast<std::size_t>(j) * m;
                const double* prev = bundle.field.w.data() +
                                     static_cast<std::size_t>(j - 1) * m;
                for (std::size_t c = 0; c < m; ++c) {
                    const double ind = e <= field_grid_[c] ? 1.0 : 0.0;
                    row[c] = prev[c] + (ind - p[c]) / root_k;
                }
            }
            bundle.has_field = true;
        }
    }

    if (needs_w_at_q_ && bundle.has_field) {
        bundle.w_at_q.k = k;
        bundle.w_at_q.values.resize(static_cast<std::size_t>(k) + 1);
        for (int j = 0; j <= k; ++j) {
            bundle.w_at_q.values[static_cast<std::size_t>(j)] = bundle.field.at(j, m - 1);
        }
        bundle.has_w_at_q = true;
    }
    return bundle;
}

std::optional<double> LimitSampler::assemble(const PathBundle& bundle) const {
    const std::size_t marks = params_.x_grid.size();
    switch (kind_) {
        case LimitKind::MarkedSupLong: {
            const PathGrid gz = transform_path(bundle.s, params_.g);
            const double j_int = forward_integral(gz, bundle.s);
            std::vector<double> values(marks);
            for (std::size_t x = 0; x < marks; ++x) values[x] = f_on_grid_[x] * j_int;
            return sup_over(values, params_.sup_mode);
        }
        case LimitKind::MarkedSupShort: {
            const PathGrid gs = transform_path(bundle.s, params_.g);
            std::vector<double> values(marks);
            for (std::size_t x = 0; x < marks; ++x) {
                values[x] = forward_integral(gs, bundle.field, x);
            }
            return sup_over(values, params_.sup_mode);
        }
        case LimitKind::QuantileError:
            return limit_quantile_error(bundle.s, bundle.w_at_q, params_.f_at_qtau);
        case LimitKind::LseError:
            return limit_lse_error(bundle.s, bundle.s_squared);
        case LimitKind::ResidualSupQuantile: {
            const double denom = trapezoid_square_integral(bundle.s);
            if (denom < kDegenerateIntegral) return std::nullopt;
            const double q_limit =
                -forward_integral(bundle.s, bundle.w_at_q) / (params_.f_at_qtau * denom);
            const PathGrid gs = transform_path(bundle.s, params_.g);
            const double c_gs = trapezoid_product_integral(gs, bundle.s);
            std::vector<double> values(marks);
            for (std::size_t x = 0; x < marks; ++x) {
                values[x] = f_on_grid_[x] * q_limit * c_gs +
                            forward_integral(gs, bundle.field, x);
            }
            return sup_over(values, params_.sup_mode);
        }
        case LimitKind::ResidualSupLseHeavy:
        case LimitKind::ResidualSupLseRootN: {
            const double denom = left_riemann_square_integral(bundle.s);
            if (denom < kDegenerateIntegral) return std::nullopt;
            const double s1 = bundle.s.terminal();
            // int S(t-) dS(t) in the sense of the least-squares limit:
            // (S(1)^2 - s^2)/2.
            const double s_ds = 0.5 * (s1 * s1 - bundle.s_squared);
            const PathGrid gs = transform_path(bundle.s, params_.g);
            const double c_gs = trapezoid_product_integral(gs, bundle.s);
            const double core = s_ds * c_gs / denom;
            std::vector<double> values(marks);
            for (std::size_t x = 0; x < marks; ++x) {
                values[x] = f_on_grid_[x] * core;
                if (kind_ == LimitKind::ResidualSupLseRootN) {
                    values[x] += forward_integral(gs, bundle.field, x);
                }
            }
            return sup_over(values, params_.sup_mode);
        }
    }
    throw ConfigError("unknown limit kind");
}

std::optional<double> LimitSampler::draw(RandomStream& rs) const {
    return assemble(draw_bundle(rs));
}

LimitEnsemble limit_sup_statistic(LimitKind kind, const LimitParams& params,
                                  long replications, NoiseStream base, int threads) {
    if (replications < 1) throw ConfigError("replications must be >= 1");
    LimitSampler sampler(kind, params);
    LimitEnsemble out;
    out.draws.assign(static_cast<std::size_t>(replications), 0.0);
    out.k = params.k;
    out.kind = to_string(kind);
    out.cov_model = params.cov_model == CovModel::PlugInIID ? "plugin_iid" : "long_run";
    std::vector<long> rejections(static_cast<std::size_t>(replications), 0);

    parallel_for(0, replications, threads, [&](long r) {
        RandomStream rs(base.seed, base.stream_id + static_cast<std::uint64_t>(r));
        for (int attempt = 0; attempt < 100; ++attempt) {
            const auto v = sampler.draw(rs);
            if (v.has_value()) {
                out.draws[static_cast<std::size_t>(r)] = *v;
                rejections[static_cast<std::size_t>(r)] = attempt;
                return;
            }
        }
        throw NumericalError("limit draw rejected 100 times in a row");
    });
    for (const long c : rejections) out.rejections += c;
    return out;
}

} // namespace unitmark
