#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "prelim/classifier.hpp"
#include "prelim/dataset.hpp"

namespace prelim {

struct TreeNode {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double prob1 = 0.0;   // class-1 probability at a leaf
    double weight = 0.0;  // total example weight that reached the node
    std::uint32_t count = 0;

    bool is_leaf() const { return feature < 0; }
};

struct CartConfig {
    std::size_t max_leaves = 0;            // 0 = unlimited; else best-first growth
    std::size_t min_internal_samples = 0;  // internal nodes must hold more rows than this
    double weight0 = 1.0;                  // class-0 example weight
    double weight1 = 1.0;                  // class-1 example weight
    std::size_t max_features = 0;          // 0 = all; else random subset per split
    std::uint64_t seed = 0;
};

// Binary CART classifier: axis-aligned tests "x[f] <= t", leaves carry a
// class-1 probability and sample count.
class DecisionTree final : public RuleModel {
  public:
    DecisionTree() = default;
    DecisionTree(std::vector<TreeNode> nodes, std::size_t n_features);

    std::size_t n_features() const override { return n_features_; }
    double score_row(std::span<const double> row) const override;
    std::size_t complexity() const override { return leaf_count(); }
    std::string describe(const std::vector<std::string>& feature_names) const override;

    std::size_t leaf_count() const;
    const std::vector<TreeNode>& nodes() const { return nodes_; }

    // Index of the leaf a row is routed to.
    std::size_t leaf_for(std::span<const double> row) const;

  private:
    std::vector<TreeNode> nodes_;
    std::size_t n_features_ = 0;
};

// Greedy weighted-Gini CART. Splits use midpoint thresholds between adjacent
// distinct values; ties break to the lowest feature index, then the lowest
// threshold. With max_leaves set, growth is best-first by impurity decrease.
// Gains are computed from exact per-class counts, so the learned structure is
// invariant to row order and to duplicating every row.
DecisionTree cart_fit(const Matrix& x, std::span<const double> y, const CartConfig& cfg = {});
DecisionTree cart_fit(const Dataset& d, const CartConfig& cfg = {});

// Inverse-frequency weights N/(2*N_class); returns {1,1} when a class is
// absent.
std::pair<double, double> minority_weights(std::span<const double> y);

}  // namespace prelim
