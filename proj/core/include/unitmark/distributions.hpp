#pragma once

#include <memory>
#include <string>
#include <vector>

namespace unitmark {

struct InnovationSpec;

/// Reference distribution of an innovation: CDF everywhere, density where
/// one exists.
class Distribution {
public:
    virtual ~Distribution() = default;
    virtual double cdf(double x) const = 0;
    virtual bool has_density() const { return true; }
    /// Throws NumericalError when has_density() is false.
    virtual double pdf(double x) const = 0;
    virtual std::string id() const = 0;
};

using DistributionPtr = std::shared_ptr<const Distribution>;

DistributionPtr make_normal(double sigma = 1.0);
DistributionPtr make_student_t(double df, double scale = 1.0);
/// Atoms at -c and +c with probability 1/2 each; no density.
DistributionPtr make_two_point(double c = 1.0);

/// Monotone piecewise-linear CDF through 2049 quantile knots of a Monte
/// Carlo sample; density by centered differencing of the interpolant.
DistributionPtr make_table_distribution(std::vector<double> draws, std::string id);

/// Stable(alpha, skew) reference CDF from a cached 1e7-draw table keyed by
/// (alpha, skew). Deterministic: the table uses a fixed internal seed.
DistributionPtr make_stable_table(double alpha, double skew);

/// Reference CDF of eps_1 for an innovation spec:
///   stable_iid          : stable table (normal(sqrt 2) at alpha = 2)
///   linear_ma  + normal : exact normal with the truncated-MA sd
///   anything else       : Monte Carlo table from the family sampler
/// n enters only through the MA truncation default.
DistributionPtr make_family_cdf(const InnovationSpec& spec, std::size_t n);

/// Pseudo-distribution whose density is identically zero; used to switch the
/// recentering correction off. cdf() throws.
DistributionPtr make_zero_density();

/// Density of the standard symmetric stable law at zero:
/// Gamma(1 + 1/alpha) / pi.
double stable_density_at_zero(double alpha);

/// Number of Monte Carlo draws behind table-backed CDFs (1e7). Exposed for
/// documentation and tests.
std::size_t table_cdf_draw_count();

} // namespace unitmark
