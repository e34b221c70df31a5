#pragma once

#include <cstdint>
#include <vector>

#include "prelim/cart.hpp"
#include "prelim/classifier.hpp"
#include "prelim/dataset.hpp"

namespace prelim {

// One hyperparameter draw for gradient boosting. max_depth is fixed at 6.
struct BtParams {
    std::size_t n_estimators = 100;  // [10, 990]
    double learning_rate = 0.1;      // [0.0001, 0.2]
    double gamma = 0.0;              // minimum split gain, [0, 0.4]
    double subsample = 1.0;          // row fraction per stage, [0.5, 1]
};

struct BtSearchSpace {
    std::size_t draws = 25;  // random-search budget
    std::size_t n_estimators_lo = 10, n_estimators_hi = 990;
    double learning_rate_lo = 0.0001, learning_rate_hi = 0.2;
    double gamma_lo = 0.0, gamma_hi = 0.4;
    double subsample_lo = 0.5, subsample_hi = 1.0;
};

// Logistic-loss Newton boosting over depth-6 regression trees. Fixed
// internals: L2 lambda = 1, min hessian mass per child = 1.
// score(x) = sigmoid(base + lr * sum of stage outputs).
class BoostedModel final : public Classifier {
  public:
    BoostedModel() = default;

    std::size_t n_features() const override { return n_features_; }
    double score_row(std::span<const double> row) const override;

    std::size_t n_stages() const { return stages_.size(); }
    double base_log_odds() const { return base_; }
    const BtParams& params() const { return params_; }
    const std::vector<std::vector<TreeNode>>& stages() const { return stages_; }

    // Training logistic loss after each stage; non-increasing whenever
    // subsample = 1 and gamma = 0.
    const std::vector<double>& staged_train_loss() const { return staged_loss_; }

  private:
    friend BoostedModel bt_fit_params(const Dataset&, const BtParams&, bool, std::uint64_t);

    std::vector<std::vector<TreeNode>> stages_;
    double base_ = 0.0;
    BtParams params_;
    std::size_t n_features_ = 0;
    std::vector<double> staged_loss_;
};

// Fits one draw. Throws InvalidHyperparameter outside the documented ranges.
BoostedModel bt_fit_params(const Dataset& d, const BtParams& params, bool weighted,
                           std::uint64_t seed);

// Random search over the space: each draw is scored by stratified 5-fold CV
// (accuracy; balanced accuracy when weighted) and the best is refitted on all
// rows.
BoostedModel bt_fit(const Dataset& d, const BtSearchSpace& space, bool weighted,
                    std::uint64_t seed);

}  // namespace prelim
