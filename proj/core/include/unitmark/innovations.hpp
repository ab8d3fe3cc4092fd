#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "unitmark/rng.hpp"

namespace unitmark {

enum class Family { StableIID, Garch11, LinearMA };
enum class SlowlyVarying { One, LogPlus }; // l(j) = 1 or l(j) = log(1 + j)
enum class NoiseLaw { Normal, StudentT, TwoPoint };

std::string to_string(Family f);
std::string to_string(SlowlyVarying l);
std::string to_string(NoiseLaw n);

/// Tagged description of an innovation model family with all parameters.
/// Unused fields are ignored by the family that does not read them.
struct InnovationSpec {
    Family family = Family::StableIID;

    // StableIID
    double alpha = 1.5; // tail index in (0, 2]
    double skew = 0.0;  // stable skewness in [-1, 1]

    // Garch11: sigma_i^2 = omega + a * sigma_{i-1}^2 + b * eps_{i-1}^2
    double omega = 0.1;
    double a = 0.0;
    double b = 0.0;

    // LinearMA: eps_i = sum_{j=1..M} c_j eta_{i-j}, c_j = j^{-theta} l(j)
    double theta = 1.5;
    SlowlyVarying slowly_varying = SlowlyVarying::One;
    long truncation = 0; // M; 0 selects max(n, 1000) at sampling time

    NoiseLaw noise = NoiseLaw::Normal;
    double noise_df = 4.0; // Student-t degrees of freedom
    long burn_in = 1000;

    /// Throws ConfigError on any violated invariant.
    void validate() const;
};

/// One realized innovation vector plus sampling diagnostics.
struct InnovationSample {
    std::vector<double> eps;
    /// Neglected l2 coefficient mass sum_{j>M} c_j^2 (LinearMA only, else 0).
    double truncation_tail_mass = 0.0;
    /// Set when the GARCH stationarity check E log(a + b eta^2) >= 0 fails.
    bool stationarity_warning = false;
};

/// One eta draw from the spec's base-noise law.
double base_noise_draw(const InnovationSpec& spec, RandomStream& rs);

/// n i.i.d. draws from the standard stable(alpha, skew) law.
std::vector<double> sample_stable_iid(double alpha, double skew, std::size_t n,
                                      RandomStream& rs);
std::vector<double> sample_stable_iid(double alpha, double skew, std::size_t n,
                                      NoiseStream stream);

/// n GARCH(1,1) draws after discarding spec.burn_in warm-up steps.
InnovationSample sample_garch(const InnovationSpec& spec, std::size_t n,
                              RandomStream& rs);
InnovationSample sample_garch(const InnovationSpec& spec, std::size_t n,
                              NoiseStream stream);

/// n draws of the truncated linear MA. Uses a direct O(nM) loop for small
/// problems and FFT convolution for large ones; the two agree to rounding.
InnovationSample sample_linear_ma(const InnovationSpec& spec, std::size_t n,
                                  RandomStream& rs);
InnovationSample sample_linear_ma(const InnovationSpec& spec, std::size_t n,
                                  NoiseStream stream);

/// Family dispatch for the three samplers above.
InnovationSample sample_innovations(const InnovationSpec& spec, std::size_t n,
                                    RandomStream& rs);
InnovationSample sample_innovations(const InnovationSpec& spec, std::size_t n,
                                    NoiseStream stream);

/// MA coefficient c_j = j^{-theta} l(j), j >= 1.
double ma_coefficient(const InnovationSpec& spec, long j);

/// Effective truncation length for a sample of size n.
long effective_truncation(const InnovationSpec& spec, std::size_t n);

/// Neglected l2 mass sum_{j>M} c_j^2.
double ma_tail_mass(const InnovationSpec& spec, long M);

/// Kesten tail index for a GARCH(1,1) spec: the root of
/// E (a + b eta^2)^{s/2} = 1, located by bisection over a Monte Carlo
/// estimate of the moment (1e6 draws, tolerance 1e-3). Cached per spec.
double kesten_index(const InnovationSpec& spec);

/// Scaling constant a_n, leading-order form with constants absorbed:
///   StableIID / Garch11 : n^{1/alpha} (alpha<2), sqrt(n log n) (alpha=2),
///                         sqrt(n) (alpha>2, GARCH only)
///   LinearMA, theta < 1 : n^{3/2-theta} l(n)
///   LinearMA, theta >= 1: sqrt(n)
double normalizer_a_n(const InnovationSpec& spec, std::size_t n);

/// theta in (1/2, 1) for a LinearMA spec.
bool is_long_memory(const InnovationSpec& spec);

/// Regular variation with index < 2 (stable alpha < 2 or Kesten index < 2).
bool is_infinite_variance(const InnovationSpec& spec);

/// Marginal standard deviation of eps_1 where it is finite and closed-form
/// (LinearMA: |c|_2 times the noise sd). Throws NumericalError otherwise.
double ma_marginal_sd(const InnovationSpec& spec, std::size_t n);

double noise_sd(NoiseLaw law, double df);

} // namespace unitmark
