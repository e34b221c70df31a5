#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "prelim/classifier.hpp"
#include "prelim/matrix.hpp"

namespace prelim {

// Single axis-aligned box (subgroup): per-feature closed interval, with
// unrestricted features spanning the full range. Membership predicts class 1.
class Box final : public RuleModel {
  public:
    Box() = default;
    explicit Box(std::size_t n_features);

    std::size_t n_features() const override { return lows_.size(); }
    double score_row(std::span<const double> row) const override;
    std::size_t complexity() const override;  // number of restricted features
    std::string describe(const std::vector<std::string>& feature_names) const override;

    void restrict(std::size_t feature, double low, double high);
    void release(std::size_t feature);

    bool contains(std::span<const double> row) const;
    bool is_restricted(std::size_t feature) const { return restricted_[feature] != 0; }
    double low(std::size_t feature) const { return lows_[feature]; }
    double high(std::size_t feature) const { return highs_[feature]; }

  private:
    std::vector<double> lows_;
    std::vector<double> highs_;
    std::vector<char> restricted_;
};

// WRAcc of a box over (x, targets): n = covered rows, n+ = their target sum.
double box_wracc(const Box& box, const Matrix& x, std::span<const double> targets);

// Candidate peel fractions searched for the peeling loop.
inline constexpr double kPrimAlphaGrid[] = {0.03, 0.05, 0.07, 0.1, 0.13, 0.16, 0.2};

// Iterative peeling: each step removes the alpha-quantile slab (either end of
// any feature) that maximizes the WRAcc of the remaining box; the best box
// along the trajectory is returned. Peeling stops once no candidate leaves at
// least min_support rows. Targets may be labels or probability scores.
Box prim_fit(const Matrix& x, std::span<const double> targets, double alpha,
             std::size_t min_support = 10);

struct PrimFit {
    Box box;
    double alpha = 0.0;
};

// Grid search over kPrimAlphaGrid by stratified 5-fold CV on held-out WRAcc,
// then a final peel on all rows.
PrimFit prim_fit_cv(const Matrix& x, std::span<const double> targets, std::uint64_t seed,
                    std::size_t min_support = 10);

// Feature budgets {Z - j*ceil(Z/5) : j >= 0, positive}, Z = min(15, M).
std::vector<std::size_t> bi_budget_grid(std::size_t m);

// Greedy WRAcc maximization one feature at a time: per pass, each feature's
// interval is replaced by the exact 1-D optimum given the other bounds
// (prefix-sum scan over distinct values); passes repeat until none improves.
// At most feature_budget features end up restricted.
Box bestinterval_fit(const Matrix& x, std::span<const double> targets,
                     std::size_t feature_budget);

struct BiFit {
    Box box;
    std::size_t budget = 0;
};

// Budget selection over bi_budget_grid (optionally capped) by stratified
// 5-fold CV on held-out WRAcc.
BiFit bestinterval_fit_cv(const Matrix& x, std::span<const double> targets, std::uint64_t seed,
                          std::size_t budget_cap = 0);

}  // namespace prelim
