#include "prelim/classifier.hpp"

#include "prelim/errors.hpp"

namespace prelim {

void Classifier::check_width(std::size_t cols) const {
    if (cols != n_features()) {
        throw DimensionMismatch("classifier expects " + std::to_string(n_features()) +
                                " features, got " + std::to_string(cols));
    }
}

std::vector<double> Classifier::score(const Matrix& x) const {
    check_width(x.cols());
    std::vector<double> out(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) out[r] = score_row(x.row(r));
    return out;
}

std::vector<int> Classifier::predict(const Matrix& x) const {
    check_width(x.cols());
    std::vector<int> out(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) out[r] = score_row(x.row(r)) >= 0.5 ? 1 : 0;
    return out;
}

int Classifier::predict_row(std::span<const double> row) const {
    check_width(row.size());
    return score_row(row) >= 0.5 ? 1 : 0;
}

std::size_t complexity(const RuleModel& model) {
    return model.complexity();
}

}  // namespace prelim
