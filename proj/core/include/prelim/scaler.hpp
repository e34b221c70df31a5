#pragma once

#include <vector>

#include "prelim/dataset.hpp"
#include "prelim/matrix.hpp"

namespace prelim {

// Per-feature min-max scaler fitted on a train split. Train values map into
// [0,1]; values outside the fitted range (test data) are not clipped.
// Constant features map to 0 everywhere.
class Scaler {
  public:
    static Scaler fit(const Dataset& train);

    Matrix transform(const Matrix& x) const;
    Dataset transform(const Dataset& d) const;
    Matrix inverse_transform(const Matrix& x) const;

    const std::vector<double>& mins() const { return mins_; }
    const std::vector<double>& maxs() const { return maxs_; }

  private:
    std::vector<double> mins_;
    std::vector<double> maxs_;
};

Scaler fit_scaler(const Dataset& train);
Dataset apply_scaler(const Scaler& s, const Dataset& d);

}  // namespace prelim
