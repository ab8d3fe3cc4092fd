#include "unitmark/paths.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "unitmark/errors.hpp"
#include "unitmark/fft.hpp"
#include "unitmark/innovations.hpp"
#include "unitmark/weight.hpp"

namespace unitmark {

namespace {

void check_k(int k) {
    if (k < 16) throw ConfigError("time grid needs k >= 16");
}

// Unit-spacing fGn autocovariance for Hurst index H.
double fgn_cov(double H, long h) {
    const double ah = std::abs(static_cast<double>(h));
    return 0.5 * (std::pow(ah + 1.0, 2.0 * H) - 2.0 * std::pow(ah, 2.0 * H) +
                  std::pow(std::abs(ah - 1.0), 2.0 * H));
}

struct Embedding {
    std::size_t m = 0;
    std::vector<double> sqrt_lambda; // scaled for the synthesis step
    bool valid = false;
};

// Circulant-embedding spectrum for k fGn increments with Hurst H, padded to
// a power of two >= 2k. Cached per (H, k).
const Embedding& fbm_embedding(double H, int k) {
    static std::mutex mutex;
    static std::map<std::pair<double, int>, Embedding> cache;
    std::lock_guard<std::mutex> lock(mutex);
    const auto key = std::make_pair(H, k);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    Embedding emb;
    emb.m = fft::next_pow2(2 * static_cast<std::size_t>(k));
    const std::size_t m = emb.m;
    std::vector<std::complex<double>> row(m);
    for (std::size_t j = 0; j < m; ++j) {
        const long lag = j <= m / 2 ? static_cast<long>(j) : static_cast<long>(m - j);
        row[j] = fgn_cov(H, lag);
    }
    const auto spec = fft::forward(row);
    emb.sqrt_lambda.resize(m);
    emb.valid = true;
    for (std::size_t j = 0; j < m; ++j) {
        const double lambda = spec[j].real();
        if (lambda < -1e-9) {
            emb.valid = false;
            break;
        }
        emb.sqrt_lambda[j] = std::sqrt(std::max(0.0, lambda) / static_cast<double>(m));
    }
    return cache.emplace(key, std::move(emb)).first->second;
}

// Dense-Cholesky fallback factor of the k x k fGn covariance.
const Eigen::MatrixXd& fbm_cholesky(double H, int k) {
    static std::mutex mutex;
    static std::map<std::pair<double, int>, Eigen::MatrixXd> cache;
    std::lock_guard<std::mutex> lock(mutex);
    const auto key = std::make_pair(H, k);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    if (k > 4096)
        throw NumericalError(
            "fbm: embedding spectrum not PSD and k > 4096; enlarge the embedding");
    Eigen::MatrixXd cov(k, k);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) cov(i, j) = fgn_cov(H, i - j);
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
        throw NumericalError("fbm: dense Cholesky of the increment covariance failed");
    return cache.emplace(key, Eigen::MatrixXd(llt.matrixL())).first->second;
}

} // namespace

PathGrid simulate_stable_path(double alpha, double skew, int k, RandomStream& rs,
                              bool unit_variance) {
    check_k(k);
    if (!(alpha > 0.0 && alpha <= 2.0)) throw ConfigError("alpha must lie in (0, 2]");
    PathGrid path;
    path.k = k;
    path.values.resize(static_cast<std::size_t>(k) + 1);
    const double scale =
        std::pow(static_cast<double>(k), -1.0 / alpha) / (unit_variance ? std::sqrt(2.0) : 1.0);
    double acc = 0.0;
    path.values[0] = 0.0;
    for (int j = 1; j <= k; ++j) {
        acc += stable_draw(alpha, skew, rs);
        path.values[static_cast<std::size_t>(j)] = acc * scale;
    }
    return path;
}

PathGrid simulate_stable_path(double alpha, double skew, int k, NoiseStream stream,
                              bool unit_variance) {
    RandomStream rs(stream);
    return simulate_stable_path(alpha, skew, k, rs, unit_variance);
}

PathGrid simulate_fbm(double theta, int k, RandomStream& rs) {
    check_k(k);
    if (!(theta > 0.5 && theta <= 1.0))
        throw ConfigError("fbm requires theta in (1/2, 1]; H = 3/2 - theta");
    const double H = 1.5 - theta;
    PathGrid path;
    path.k = k;
    path.values.assign(static_cast<std::size_t>(k) + 1, 0.0);
    const double inc_scale = std::pow(static_cast<double>(k), -H);

    const Embedding& emb = fbm_embedding(H, k);
    if (emb.valid) {
        const std::size_t m = emb.m;
        std::vector<std::complex<double>> spectrum(m);
        spectrum[0] = emb.sqrt_lambda[0] * rs.next_normal();
        spectrum[m / 2] = emb.sqrt_lambda[m / 2] * rs.next_normal();
        const double half = std::sqrt(0.5);
        for (std::size_t j = 1; j < m / 2; ++j) {
            const double re = rs.next_normal() * half;
            const double im = rs.next_normal() * half;
            spectrum[j] = emb.sqrt_lambda[j] * std::complex<double>(re, im);
            spectrum[m - j] = std::conj(spectrum[j]);
        }
        const auto synth = fft::forward(spectrum);
        double acc = 0.0;
        for (int j = 0; j < k; ++j) {
            acc += synth[static_cast<std::size_t>(j)].real() * inc_scale;
            path.values[static_cast<std::size_t>(j) + 1] = acc;
        }
        return path;
    }

    const Eigen::MatrixXd& L = fbm_cholesky(H, k);
    Eigen::VectorXd z(k);
    for (int j = 0; j < k; ++j) z(j) = rs.next_normal();
    const Eigen::VectorXd inc = L * z;
    double acc = 0.0;
    for (int j = 0; j < k; ++j) {
        acc += inc(j) * inc_scale;
        path.values[static_cast<std::size_t>(j) + 1] = acc;
    }
    return path;
}

PathGrid simulate_fbm(double theta, int k, NoiseStream stream) {
    RandomStream rs(stream);
    return simulate_fbm(theta, k, rs);
}

MarkCovariance plug_in_iid_cov(const Distribution& F, const std::vector<double>& x_grid) {
    MarkCovariance cov;
    cov.x_grid = x_grid;
    cov.model = CovModel::PlugInIID;
    const std::size_t m = x_grid.size();
    cov.gamma.resize(m * m);
    std::vector<double> p(m);
    for (std::size_t i = 0; i < m; ++i) p[i] = F.cdf(x_grid[i]);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            cov.gamma[i * m + j] = p[std::min(i, j)] - p[i] * p[j];
        }
    }
    return cov;
}

MarkCovariance estimate_long_run_cov(const InnovationSpec& spec, const Distribution& F,
                                     const std::vector<double>& x_grid,
                                     std::size_t n_sim, NoiseStream stream) {
    if (n_sim < 16) throw ConfigError("long-run covariance estimate needs n_sim >= 16");
    const auto sample = sample_innovations(spec, n_sim, stream);
    const std::size_t blocks = static_cast<std::size_t>(std::sqrt(static_cast<double>(n_sim)));
    const std::size_t len = n_sim / blocks;
    const std::size_t m = x_grid.size();

    std::vector<double> p(m);
    for (std::size_t i = 0; i < m; ++i) p[i] = F.cdf(x_grid[i]);

    MarkCovariance cov;
    cov.x_grid = x_grid;
    cov.model = CovModel::LongRunEstimate;
    cov.gamma.assign(m * m, 0.0);
    std::vector<double> u(m);
    for (std::size_t b = 0; b < blocks; ++b) {
        std::fill(u.begin(), u.end(), 0.0);
        for (std::size_t i = b * len; i < (b + 1) * len; ++i) {
            const double e = sample.eps[i];
            // I(eps <= x_j) is a step over the sorted grid.
            const auto it = std::lower_bound(x_grid.begin(), x_grid.end(), e);
            const std::size_t first = static_cast<std::size_t>(it - x_grid.begin());
            for (std::size_t j = 0; j < m; ++j) {
                u[j] += (j >= first ? 1.0 : 0.0) - p[j];
            }
        }
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                cov.gamma[i * m + j] += u[i] * u[j];
            }
        }
    }
    const double scale = 1.0 / (static_cast<double>(blocks) * static_cast<double>(len));
    for (auto& v : cov.gamma) v *= scale;
    return cov;
}

std::vector<double> factor_mark_covariance(const MarkCovariance& cov) {
    const std::size_t m = cov.x_grid.size();
    Eigen::MatrixXd gamma(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            // Symmetrize to wash out estimate asymmetry.
            gamma(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                0.5 * (cov.at(i, j) + cov.at(j, i));
        }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(gamma);
    Eigen::MatrixXd L;
    if (llt.info() == Eigen::Success) {
        L = llt.matrixL();
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gamma);
        if (eig.info() != Eigen::Success)
            throw NumericalError("mark covariance eigendecomposition failed");
        Eigen::VectorXd lam = eig.eigenvalues();
        for (Eigen::Index i = 0; i < lam.size(); ++i) {
            if (lam(i) < -1e-8)
                throw NumericalError("mark covariance is not positive semidefinite");
            lam(i) = std::sqrt(std::max(0.0, lam(i)));
        }
        L = eig.eigenvectors() * lam.asDiagonal();
    }
    std::vector<double> out(m * m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            out[i * m + j] = L(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
    }
    return out;
}

FieldGrid simulate_mark_field_factored(int k, const std::vector<double>& x_grid,
                                       const std::vector<double>& L,
                                       RandomStream& rs) {
    check_k(k);
    const std::size_t m = x_grid.size();
    if (L.size() != m * m) throw ConfigError("covariance factor does not match grid");
    FieldGrid field;
    field.k = k;
    field.x_grid = x_grid;
    field.w.assign(static_cast<std::size_t>(k + 1) * m, 0.0);
    const double scale = 1.0 / std::sqrt(static_cast<double>(k));
    std::vector<double> z(m);
    for (int j = 1; j <= k; ++j) {
        for (auto& v : z) v = rs.next_normal();
        double* row = field.w.data() + static_cast<std::size_t>(j) * m;
        const double* prev = field.w.data() + static_cast<std::size_t>(j - 1) * m;
        for (std::size_t r = 0; r < m; ++r) {
            double acc = 0.0;
            const double* Lrow = L.data() + r * m;
            // The factor is lower-triangular from LLT but full from the
            // eigen fallback; always take the full row.
            for (std::size_t c = 0; c < m; ++c) acc += Lrow[c] * z[c];
            row[r] = prev[r] + acc * scale;
        }
    }
    return field;
}

FieldGrid simulate_mark_field(int k, const MarkCovariance& cov, RandomStream& rs) {
    return simulate_mark_field_factored(k, cov.x_grid, factor_mark_covariance(cov), rs);
}

FieldGrid simulate_mark_field(int k, const MarkCovariance& cov, NoiseStream stream) {
    RandomStream rs(stream);
    return simulate_mark_field(k, cov, rs);
}

PathGrid transform_path(const PathGrid& path, const WeightFunction& g) {
    PathGrid out;
    out.k = path.k;
    out.values.resize(path.values.size());
    for (std::size_t j = 0; j < path.values.size(); ++j) out.values[j] = g(path.values[j]);
    return out;
}

PathGrid subsample_path(const PathGrid& path, int factor) {
    if (factor < 1 || path.k % factor != 0)
        throw ConfigError("subsample factor must divide k");
    PathGrid out;
    out.k = path.k / factor;
    out.values.resize(static_cast<std::size_t>(out.k) + 1);
    for (int j = 0; j <= out.k; ++j) {
        out.values[static_cast<std::size_t>(j)] =
            path.values[static_cast<std::size_t>(j) * static_cast<std::size_t>(factor)];
    }
    return out;
}

FieldGrid subsample_field(const FieldGrid& field, int factor) {
    if (factor < 1 || field.k % factor != 0)
        throw ConfigError("subsample factor must divide k");
    FieldGrid out;
    out.k = field.k / factor;
    out.x_grid = field.x_grid;
    const std::size_t m = field.x_grid.size();
    out.w.resize(static_cast<std::size_t>(out.k + 1) * m);
    for (int j = 0; j <= out.k; ++j) {
        const double* src = field.w.data() + static_cast<std::size_t>(j) *
                                                 static_cast<std::size_t>(factor) * m;
        std::copy(src, src + m, out.w.data() + static_cast<std::size_t>(j) * m);
    }
    return out;
}

} // namespace unitmark
