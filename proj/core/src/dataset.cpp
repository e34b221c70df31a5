#include "prelim/dataset.hpp"

#include <cmath>
#include <numeric>

#include "prelim/errors.hpp"

namespace prelim {

Dataset::Dataset(Matrix features, std::vector<double> targets,
                 std::vector<std::string> feature_names, LabelKind kind)
    : features_(std::move(features)),
      targets_(std::move(targets)),
      feature_names_(std::move(feature_names)),
      kind_(kind) {
    if (features_.rows() == 0 || features_.cols() == 0) {
        throw EmptyAfterFiltering("dataset requires N >= 1 and M >= 1");
    }
    if (targets_.size() != features_.rows()) {
        throw LengthMismatch("dataset: " + std::to_string(features_.rows()) + " rows vs " +
                             std::to_string(targets_.size()) + " targets");
    }
    if (feature_names_.empty()) feature_names_ = default_feature_names(features_.cols());
    if (feature_names_.size() != features_.cols()) {
        throw LengthMismatch("dataset: feature name count does not match columns");
    }
    if (!features_.all_finite()) throw BadFormat("dataset: non-finite feature value");
    for (double t : targets_) {
        if (!std::isfinite(t)) throw BadFormat("dataset: non-finite target");
        if (kind_ == LabelKind::binary) {
            if (t != 0.0 && t != 1.0) throw BadFormat("dataset: binary target not in {0,1}");
        } else if (t < 0.0 || t > 1.0) {
            throw BadFormat("dataset: score target outside [0,1]");
        }
    }
}

double Dataset::positives() const {
    return std::accumulate(targets_.begin(), targets_.end(), 0.0);
}

bool Dataset::both_classes_present() const {
    bool has0 = false;
    bool has1 = false;
    for (double t : targets_) {
        if (t == 0.0) has0 = true;
        if (t == 1.0) has1 = true;
    }
    return has0 && has1;
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
    std::vector<double> y(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) y[i] = targets_[indices[i]];
    return Dataset(features_.take_rows(indices), std::move(y), feature_names_, kind_);
}

Dataset Dataset::concat(const Dataset& a, const Dataset& b) {
    if (a.n_cols() != b.n_cols()) throw DimensionMismatch("concat: column counts differ");
    Matrix x = a.x();
    std::vector<double> y = a.y();
    for (std::size_t r = 0; r < b.n_rows(); ++r) x.append_row(b.row(r));
    y.insert(y.end(), b.y().begin(), b.y().end());
    const LabelKind kind =
        (a.label_kind() == LabelKind::score || b.label_kind() == LabelKind::score)
            ? LabelKind::score
            : LabelKind::binary;
    return Dataset(std::move(x), std::move(y), a.feature_names(), kind);
}

std::vector<std::string> default_feature_names(std::size_t m) {
    std::vector<std::string> names(m);
    for (std::size_t i = 0; i < m; ++i) names[i] = "x" + std::to_string(i + 1);
    return names;
}

}  // namespace prelim
