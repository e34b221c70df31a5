#pragma once

#include <cstdint>
#include <vector>

#include "prelim/cart.hpp"
#include "prelim/classifier.hpp"
#include "prelim/dataset.hpp"

namespace prelim {

// Bagged CART ensemble; the predicted probability is the arithmetic mean of
// per-tree leaf probabilities.
class ForestModel final : public Classifier {
  public:
    ForestModel() = default;
    ForestModel(std::vector<DecisionTree> trees, std::size_t n_features,
                std::size_t max_features);

    std::size_t n_features() const override { return n_features_; }
    double score_row(std::span<const double> row) const override;

    const std::vector<DecisionTree>& trees() const { return trees_; }
    std::size_t max_features() const { return max_features_; }

  private:
    std::vector<DecisionTree> trees_;
    std::size_t n_features_ = 0;
    std::size_t max_features_ = 0;
};

// Candidate split widths {2, ceil(sqrt(M)), M} clamped to [1, M], unique and
// ascending.
std::vector<std::size_t> rf_feature_grid(std::size_t m);

ForestModel rf_fit(const Dataset& d, std::size_t n_trees, std::size_t max_features,
                   bool weighted, std::uint64_t seed, bool bootstrap = true);

// Grid search over rf_feature_grid via stratified 5-fold CV (accuracy;
// balanced accuracy when weighted), then a final fit on all rows.
ForestModel rf_fit_cv(const Dataset& d, std::size_t n_trees, bool weighted,
                      std::uint64_t seed);

}  // namespace prelim
