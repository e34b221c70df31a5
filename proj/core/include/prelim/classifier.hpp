#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "prelim/matrix.hpp"

namespace prelim {

// Fitted predictive model: class-1 probability scores plus hard labels
// (score >= 0.5). Trees, forests, boosted ensembles and all white boxes
// satisfy this interface.
class Classifier {
  public:
    virtual ~Classifier() = default;

    virtual std::size_t n_features() const = 0;

    virtual double score_row(std::span<const double> row) const = 0;

    std::vector<double> score(const Matrix& x) const;
    std::vector<int> predict(const Matrix& x) const;
    int predict_row(std::span<const double> row) const;

  protected:
    void check_width(std::size_t cols) const;
};

// Interpretable model: a tree, an ordered decision list, or a single box.
class RuleModel : public Classifier {
  public:
    // Leaves for trees, rules for lists, restricted features for boxes.
    virtual std::size_t complexity() const = 0;

    // Line-oriented text form: one rule/node per line, feature names,
    // operators and 9-significant-digit thresholds.
    virtual std::string describe(const std::vector<std::string>& feature_names) const = 0;
};

std::size_t complexity(const RuleModel& model);

}  // namespace prelim
