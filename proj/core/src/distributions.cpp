#include "unitmark/distributions.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "unitmark/errors.hpp"
#include "unitmark/innovations.hpp"

namespace unitmark {

namespace {

constexpr std::uint64_t kTableSeed = 0x7461626c65636466ULL; // "tablecdf"
constexpr std::size_t kTableDraws = 10000000;
constexpr std::size_t kTableKnots = 2049;

class NormalDist final : public Distribution {
public:
    explicit NormalDist(double sigma) : sigma_(sigma) {
        if (!(sigma > 0.0)) throw ConfigError("normal sigma must be > 0");
    }
    double cdf(double x) const override {
        return 0.5 * std::erfc(-x / (sigma_ * std::numbers::sqrt2));
    }
    double pdf(double x) const override {
        const double z = x / sigma_;
        return std::exp(-0.5 * z * z) / (sigma_ * std::sqrt(2.0 * std::numbers::pi));
    }
    std::string id() const override { return "normal(" + std::to_string(sigma_) + ")"; }

private:
    double sigma_;
};

class StudentTDist final : public Distribution {
public:
    StudentTDist(double df, double scale) : dist_(df), scale_(scale) {
        if (!(scale > 0.0)) throw ConfigError("student_t scale must be > 0");
    }
    double cdf(double x) const override { return boost::math::cdf(dist_, x / scale_); }
    double pdf(double x) const override { return boost::math::pdf(dist_, x / scale_) / scale_; }
    std::string id() const override {
        return "student_t(" + std::to_string(dist_.degrees_of_freedom()) + ")";
    }

private:
    boost::math::students_t dist_;
    double scale_;
};

class TwoPointDist final : public Distribution {
public:
    explicit TwoPointDist(double c) : c_(c) {
        if (!(c > 0.0)) throw ConfigError("two_point support must be > 0");
    }
    double cdf(double x) const override {
        if (x < -c_) return 0.0;
        if (x < c_) return 0.5;
        return 1.0;
    }
    bool has_density() const override { return false; }
    double pdf(double) const override {
        throw NumericalError("two_point distribution has no density");
    }
    std::string id() const override { return "two_point(" + std::to_string(c_) + ")"; }

private:
    double c_;
};

class TableDist final : public Distribution {
public:
    TableDist(std::vector<double> draws, std::string id) : id_(std::move(id)) {
        if (draws.size() < kTableKnots)
            throw ConfigError("table distribution needs at least 2049 draws");
        std::sort(draws.begin(), draws.end());
        const std::size_t n = draws.size();
        knots_x_.resize(kTableKnots);
        knots_p_.resize(kTableKnots);
        for (std::size_t i = 0; i < kTableKnots; ++i) {
            const double p = static_cast<double>(i) / static_cast<double>(kTableKnots - 1);
            // Order statistic at level p; endpoints pulled in by half a draw
            // so the table never claims exact 0/1 mass at finite x.
            const std::size_t idx = std::min(
                n - 1, static_cast<std::size_t>(p * static_cast<double>(n - 1) + 0.5));
            knots_x_[i] = draws[idx];
            knots_p_[i] = std::min(1.0 - 0.5 / static_cast<double>(n),
                                   std::max(0.5 / static_cast<double>(n), p));
        }
        // Enforce strict monotonicity in x (heavy ties collapse knots).
        std::size_t w = 1;
        for (std::size_t i = 1; i < kTableKnots; ++i) {
            if (knots_x_[i] > knots_x_[w - 1]) {
                knots_x_[w] = knots_x_[i];
                knots_p_[w] = knots_p_[i];
                ++w;
            } else {
                knots_p_[w - 1] = knots_p_[i]; // keep the highest level at a tie
            }
        }
        knots_x_.resize(w);
        knots_p_.resize(w);
        const double iqr = quantile_knot(0.75) - quantile_knot(0.25);
        fd_step_ = std::max(1e-6, 0.05 * (iqr > 0.0 ? iqr : 1.0));
    }

    double cdf(double x) const override {
        if (x <= knots_x_.front()) return x < knots_x_.front() ? 0.0 : knots_p_.front();
        if (x >= knots_x_.back()) return x > knots_x_.back() ? 1.0 : knots_p_.back();
        const auto it = std::upper_bound(knots_x_.begin(), knots_x_.end(), x);
        const std::size_t hi = static_cast<std::size_t>(it - knots_x_.begin());
        const std::size_t lo = hi - 1;
        const double span = knots_x_[hi] - knots_x_[lo];
        const double frac = span > 0.0 ? (x - knots_x_[lo]) / span : 1.0;
        return knots_p_[lo] + frac * (knots_p_[hi] - knots_p_[lo]);
    }

    double pdf(double x) const override {
        return std::max(0.0, (cdf(x + fd_step_) - cdf(x - fd_step_)) / (2.0 * fd_step_));
    }

    std::string id() const override { return id_; }

private:
    double quantile_knot(double p) const {
        const auto it = std::lower_bound(knots_p_.begin(), knots_p_.end(), p);
        const std::size_t i = std::min<std::size_t>(
            knots_p_.size() - 1, static_cast<std::size_t>(it - knots_p_.begin()));
        return knots_x_[i];
    }

    std::vector<double> knots_x_;
    std::vector<double> knots_p_;
    double fd_step_ = 0.05;
    std::string id_;
};

class ZeroDensity final : public Distribution {
public:
    double cdf(double) const override {
        throw NumericalError("zero-density pseudo-distribution has no cdf");
    }
    double pdf(double) const override { return 0.0; }
    std::string id() const override { return "zero_density"; }
};

} // namespace

DistributionPtr make_normal(double sigma) { return std::make_shared<NormalDist>(sigma); }

DistributionPtr make_zero_density() { return std::make_shared<ZeroDensity>(); }

DistributionPtr make_student_t(double df, double scale) {
    return std::make_shared<StudentTDist>(df, scale);
}

DistributionPtr make_two_point(double c) { return std::make_shared<TwoPointDist>(c); }

DistributionPtr make_table_distribution(std::vector<double> draws, std::string id) {
    return std::make_shared<TableDist>(std::move(draws), std::move(id));
}

std::size_t table_cdf_draw_count() { return kTableDraws; }

DistributionPtr make_stable_table(double alpha, double skew) {
    static std::mutex mutex;
    static std::map<std::pair<double, double>, DistributionPtr> cache;
    const auto key = std::make_pair(alpha, skew);
    {
        std::lock_guard<std::mutex> lock(mutex);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    std::vector<double> draws(kTableDraws);
    RandomStream rs(kTableSeed, 3);
    for (auto& v : draws) v = stable_draw(alpha, skew, rs);
    auto dist = make_table_distribution(
        std::move(draws), "stable_table(" + std::to_string(alpha) + "," + std::to_string(skew) + ")");
    std::lock_guard<std::mutex> lock(mutex);
    cache[key] = dist;
    return dist;
}

DistributionPtr make_family_cdf(const InnovationSpec& spec, std::size_t n) {
    spec.validate();
    switch (spec.family) {
        case Family::StableIID:
            if (spec.alpha == 2.0) return make_normal(std::numbers::sqrt2);
            return make_stable_table(spec.alpha, spec.skew);
        case Family::LinearMA:
            if (spec.noise == NoiseLaw::Normal) {
                return make_normal(ma_marginal_sd(spec, n));
            }
            break;
        case Family::Garch11:
            break;
    }
    // Monte Carlo table from the family sampler itself, fixed internal seed.
    static std::mutex mutex;
    static std::map<std::string, DistributionPtr> cache;
    const std::string key = to_string(spec.family) + "/" + to_string(spec.noise) + "/" +
                            std::to_string(spec.alpha) + "/" + std::to_string(spec.omega) + "/" +
                            std::to_string(spec.a) + "/" + std::to_string(spec.b) + "/" +
                            std::to_string(spec.theta) + "/" + std::to_string(spec.noise_df) +
                            "/" + std::to_string(effective_truncation(spec, n));
    {
        std::lock_guard<std::mutex> lock(mutex);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    InnovationSpec table_spec = spec;
    table_spec.truncation = effective_truncation(spec, n);
    auto sample = sample_innovations(table_spec, kTableDraws, NoiseStream{kTableSeed, 4});
    auto dist = make_table_distribution(std::move(sample.eps), "mc_table(" + key + ")");
    std::lock_guard<std::mutex> lock(mutex);
    cache[key] = dist;
    return dist;
}

double stable_density_at_zero(double alpha) {
    return std::tgamma(1.0 + 1.0 / alpha) / std::numbers::pi;
}

} // namespace unitmark
