#pragma once

#include <cstdint>
#include <vector>

#include "prelim/matrix.hpp"
#include "prelim/rng.hpp"

namespace prelim {

enum class CovarianceKind { full, diagonal, spherical, tied };

// EM-fitted Gaussian mixture. Covariances are stored as lower-triangular
// Cholesky factors, one per component (shared for tied).
class GaussianMixture {
  public:
    std::size_t k() const { return weights_.size(); }
    std::size_t dims() const { return means_.empty() ? 0 : means_.front().size(); }

    const std::vector<double>& weights() const { return weights_; }
    const std::vector<std::vector<double>>& means() const { return means_; }
    CovarianceKind covariance_kind() const { return kind_; }
    double log_likelihood() const { return log_likelihood_; }
    double bic() const { return bic_; }

    std::vector<double> sample_point(Rng& rng) const;

  private:
    friend GaussianMixture gmm_fit_em(const Matrix&, std::size_t, CovarianceKind,
                                      std::uint64_t, std::size_t, std::size_t, double);

    std::vector<double> weights_;
    std::vector<std::vector<double>> means_;
    std::vector<Matrix> chols_;  // lower-triangular factors
    CovarianceKind kind_ = CovarianceKind::full;
    double log_likelihood_ = 0.0;
    double bic_ = 0.0;
};

struct GmmOptions {
    std::size_t max_components = 29;
    bool diagonal_only = false;
    std::size_t restarts = 5;
    std::size_t max_iter = 200;
    double tol = 1e-6;
};

// One EM fit at fixed k and structure; best of the internal restarts.
GaussianMixture gmm_fit_em(const Matrix& x, std::size_t k, CovarianceKind kind,
                           std::uint64_t seed, std::size_t restarts = 5,
                           std::size_t max_iter = 200, double tol = 1e-6);

// Model selection: k in {1..max_components} and all covariance structures
// (diagonal only when requested), lowest BIC wins.
GaussianMixture gmm_select_bic(const Matrix& x, const GmmOptions& options, std::uint64_t seed);

}  // namespace prelim
