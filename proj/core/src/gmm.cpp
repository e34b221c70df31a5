#include "prelim/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "prelim/errors.hpp"

namespace prelim {

namespace {

constexpr double kBaseReg = 1e-6;
constexpr double kLog2Pi = 1.8378770664093454835606594728112;

// Lower-triangular Cholesky; escalates the diagonal regularizer until the
// matrix factors.
Matrix cholesky_regularized(Matrix cov) {
    const std::size_t m = cov.rows();
    double reg = 0.0;
    for (int attempt = 0; attempt < 8; ++attempt) {
        Matrix l(m, m, 0.0);
        bool ok = true;
        for (std::size_t i = 0; i < m && ok; ++i) {
            for (std::size_t j = 0; j <= i && ok; ++j) {
                double sum = cov.at(i, j) + (i == j ? reg : 0.0);
                for (std::size_t p = 0; p < j; ++p) sum -= l.at(i, p) * l.at(j, p);
                if (i == j) {
                    if (sum <= 0.0) {
                        ok = false;
                        break;
                    }
                    l.at(i, i) = std::sqrt(sum);
                } else {
                    l.at(i, j) = sum / l.at(j, j);
                }
            }
        }
        if (ok) return l;
        reg = reg == 0.0 ? kBaseReg : reg * 100.0;
    }
    throw InvalidCounts("gmm: covariance not positive definite after regularization");
}

double log_density(std::span<const double> row, const std::vector<double>& mean,
                   const Matrix& chol) {
    const std::size_t m = mean.size();
    double quad = 0.0;
    double logdet = 0.0;
    std::vector<double> z(m);
    for (std::size_t i = 0; i < m; ++i) {
        double v = row[i] - mean[i];
        for (std::size_t j = 0; j < i; ++j) v -= chol.at(i, j) * z[j];
        z[i] = v / chol.at(i, i);
        quad += z[i] * z[i];
        logdet += std::log(chol.at(i, i));
    }
    return -0.5 * (static_cast<double>(m) * kLog2Pi + quad) - logdet;
}

double n_parameters(std::size_t k, std::size_t m, CovarianceKind kind) {
    const double kd = static_cast<double>(k);
    const double md = static_cast<double>(m);
    double cov = 0.0;
    switch (kind) {
        case CovarianceKind::full: cov = kd * md * (md + 1.0) / 2.0; break;
        case CovarianceKind::diagonal: cov = kd * md; break;
        case CovarianceKind::spherical: cov = kd; break;
        case CovarianceKind::tied: cov = md * (md + 1.0) / 2.0; break;
    }
    return (kd - 1.0) + kd * md + cov;
}

// Structure projection of a scatter matrix (already divided by its mass).
Matrix project(const Matrix& cov, CovarianceKind kind) {
    const std::size_t m = cov.rows();
    Matrix out(m, m, 0.0);
    switch (kind) {
        case CovarianceKind::full:
        case CovarianceKind::tied:
            out = cov;
            break;
        case CovarianceKind::diagonal:
            for (std::size_t i = 0; i < m; ++i) out.at(i, i) = cov.at(i, i);
            break;
        case CovarianceKind::spherical: {
            double mean_var = 0.0;
            for (std::size_t i = 0; i < m; ++i) mean_var += cov.at(i, i);
            mean_var /= static_cast<double>(m);
            for (std::size_t i = 0; i < m; ++i) out.at(i, i) = mean_var;
            break;
        }
    }
    for (std::size_t i = 0; i < m; ++i) out.at(i, i) += kBaseReg;
    return out;
}

Matrix data_covariance(const Matrix& x) {
    const std::size_t n = x.rows();
    const std::size_t m = x.cols();
    std::vector<double> mean(m, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < m; ++c) mean[c] += x.at(r, c);
    }
    for (double& v : mean) v /= static_cast<double>(n);
    Matrix cov(m, m, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t i = 0; i < m; ++i) {
            const double di = x.at(r, i) - mean[i];
            for (std::size_t j = 0; j <= i; ++j) {
                cov.at(i, j) += di * (x.at(r, j) - mean[j]);
            }
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            cov.at(i, j) /= static_cast<double>(n);
            cov.at(j, i) = cov.at(i, j);
        }
    }
    return cov;
}

struct EmResult {
    std::vector<double> weights;
    std::vector<std::vector<double>> means;
    std::vector<Matrix> chols;
    double log_likelihood = -std::numeric_limits<double>::infinity();
};

EmResult run_em(const Matrix& x, std::size_t k, CovarianceKind kind, Rng rng,
                std::size_t max_iter, double tol) {
    const std::size_t n = x.rows();
    const std::size_t m = x.cols();

    EmResult res;
    res.weights.assign(k, 1.0 / static_cast<double>(k));
    res.means.resize(k);
    // Means start at k distinct rows.
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), 0);
    for (std::size_t c = 0; c < k; ++c) {
        const std::size_t j = c + rng.index(n - c);
        std::swap(pool[c], pool[j]);
        const auto row = x.row(pool[c]);
        res.means[c].assign(row.begin(), row.end());
    }
    const Matrix init_cov = project(data_covariance(x), kind == CovarianceKind::tied
                                                            ? CovarianceKind::full
                                                            : kind);
    res.chols.assign(k, cholesky_regularized(init_cov));

    std::vector<double> resp(n * k);
    std::vector<double> log_terms(k);
    double prev_ll = -std::numeric_limits<double>::infinity();

    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        // E-step.
        double ll = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double max_term = -std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < k; ++c) {
                log_terms[c] = std::log(std::max(res.weights[c], 1e-300)) +
                               log_density(x.row(i), res.means[c], res.chols[c]);
                max_term = std::max(max_term, log_terms[c]);
            }
            double denom = 0.0;
            for (std::size_t c = 0; c < k; ++c) denom += std::exp(log_terms[c] - max_term);
            ll += max_term + std::log(denom);
            for (std::size_t c = 0; c < k; ++c) {
                resp[i * k + c] = std::exp(log_terms[c] - max_term) / denom;
            }
        }
        res.log_likelihood = ll;
        if (std::abs(ll - prev_ll) < tol * (1.0 + std::abs(ll))) break;
        prev_ll = ll;

        // M-step.
        Matrix tied_scatter(m, m, 0.0);
        for (std::size_t c = 0; c < k; ++c) {
            double mass = 0.0;
            std::vector<double> mean(m, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                const double r = resp[i * k + c];
                mass += r;
                for (std::size_t j = 0; j < m; ++j) mean[j] += r * x.at(i, j);
            }
            mass = std::max(mass, 1e-10);
            for (double& v : mean) v /= mass;
            res.weights[c] = mass / static_cast<double>(n);
            res.means[c] = mean;

            Matrix scatter(m, m, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                const double r = resp[i * k + c];
                if (r == 0.0) continue;
                for (std::size_t a = 0; a < m; ++a) {
                    const double da = x.at(i, a) - mean[a];
                    for (std::size_t b = 0; b <= a; ++b) {
                        scatter.at(a, b) += r * da * (x.at(i, b) - mean[b]);
                    }
                }
            }
            for (std::size_t a = 0; a < m; ++a) {
                for (std::size_t b = 0; b <= a; ++b) scatter.at(b, a) = scatter.at(a, b);
            }
            if (kind == CovarianceKind::tied) {
                for (std::size_t a = 0; a < m; ++a) {
                    for (std::size_t b = 0; b < m; ++b) tied_scatter.at(a, b) += scatter.at(a, b);
                }
            } else {
                Matrix cov(m, m, 0.0);
                for (std::size_t a = 0; a < m; ++a) {
                    for (std::size_t b = 0; b < m; ++b) cov.at(a, b) = scatter.at(a, b) / mass;
                }
                res.chols[c] = cholesky_regularized(project(cov, kind));
            }
        }
        if (kind == CovarianceKind::tied) {
            Matrix cov(m, m, 0.0);
            for (std::size_t a = 0; a < m; ++a) {
                for (std::size_t b = 0; b < m; ++b) {
                    cov.at(a, b) = tied_scatter.at(a, b) / static_cast<double>(n);
                }
            }
            const Matrix chol = cholesky_regularized(project(cov, CovarianceKind::full));
            res.chols.assign(k, chol);
        }
        // Weights renormalize exactly.
        double wsum = 0.0;
        for (double w : res.weights) wsum += w;
        for (double& w : res.weights) w /= wsum;
    }
    return res;
}

}  // namespace

std::vector<double> GaussianMixture::sample_point(Rng& rng) const {
    const double u = rng.uniform();
    std::size_t c = 0;
    double cum = 0.0;
    for (; c < weights_.size(); ++c) {
        cum += weights_[c];
        if (u < cum) break;
    }
    if (c == weights_.size()) c = weights_.size() - 1;

    const std::size_t m = dims();
    std::vector<double> z(m);
    for (double& v : z) v = rng.normal();
    std::vector<double> out(means_[c]);
    const Matrix& l = chols_[c];
    for (std::size_t i = 0; i < m; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j <= i; ++j) acc += l.at(i, j) * z[j];
        out[i] += acc;
    }
    return out;
}

GaussianMixture gmm_fit_em(const Matrix& x, std::size_t k, CovarianceKind kind,
                           std::uint64_t seed, std::size_t restarts, std::size_t max_iter,
                           double tol) {
    if (x.rows() < 2) throw TooFewPoints("gmm: need at least two rows");
    if (k < 1 || k > x.rows()) throw InvalidHyperparameter("gmm: k outside [1, N]");

    Rng rng(mix_seed({seed, 0x6e6e, k, static_cast<std::uint64_t>(kind)}));
    EmResult best;
    for (std::size_t r = 0; r < restarts; ++r) {
        EmResult cand = run_em(x, k, kind, rng.fork(r), max_iter, tol);
        if (cand.log_likelihood > best.log_likelihood) best = std::move(cand);
    }

    GaussianMixture gm;
    gm.weights_ = std::move(best.weights);
    gm.means_ = std::move(best.means);
    gm.chols_ = std::move(best.chols);
    gm.kind_ = kind;
    gm.log_likelihood_ = best.log_likelihood;
    gm.bic_ = -2.0 * best.log_likelihood +
              n_parameters(k, x.cols(), kind) * std::log(static_cast<double>(x.rows()));
    return gm;
}

GaussianMixture gmm_select_bic(const Matrix& x, const GmmOptions& options, std::uint64_t seed) {
    std::vector<CovarianceKind> kinds;
    if (options.diagonal_only) {
        kinds = {CovarianceKind::diagonal};
    } else {
        kinds = {CovarianceKind::full, CovarianceKind::diagonal, CovarianceKind::spherical,
                 CovarianceKind::tied};
    }
    const std::size_t k_max = std::min<std::size_t>(options.max_components, x.rows());

    GaussianMixture best;
    bool first = true;
    for (std::size_t k = 1; k <= k_max; ++k) {
        for (const CovarianceKind kind : kinds) {
            GaussianMixture cand =
                gmm_fit_em(x, k, kind, seed, options.restarts, options.max_iter, options.tol);
            if (first || cand.bic() < best.bic()) {
                best = std::move(cand);
                first = false;
            }
        }
    }
    return best;
}

}  // namespace prelim
