#pragma once

#include <span>
#include <string>
#include <vector>

#include "prelim/matrix.hpp"

namespace prelim {

enum class LabelKind {
    binary,  // targets restricted to {0, 1}
    score,   // real-valued targets in [0, 1] (black-box probability labels)
};

// N x M feature matrix plus a target vector; the currency of every operation.
// Construction validates: no non-finite values, N >= 1, M >= 1, and targets
// in {0,1} (binary) or [0,1] (score).
class Dataset {
  public:
    Dataset(Matrix features, std::vector<double> targets, std::vector<std::string> feature_names,
            LabelKind kind = LabelKind::binary);

    std::size_t n_rows() const { return features_.rows(); }
    std::size_t n_cols() const { return features_.cols(); }

    const Matrix& x() const { return features_; }
    const std::vector<double>& y() const { return targets_; }
    const std::vector<std::string>& feature_names() const { return feature_names_; }
    LabelKind label_kind() const { return kind_; }

    std::span<const double> row(std::size_t r) const { return features_.row(r); }
    double label(std::size_t r) const { return targets_[r]; }

    // Sum of targets; equals the positive count for binary labels.
    double positives() const;

    bool both_classes_present() const;

    Dataset subset(std::span<const std::size_t> indices) const;

    static Dataset concat(const Dataset& a, const Dataset& b);

  private:
    Matrix features_;
    std::vector<double> targets_;
    std::vector<std::string> feature_names_;
    LabelKind kind_;
};

std::vector<std::string> default_feature_names(std::size_t m);

}  // namespace prelim
