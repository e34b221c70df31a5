#include "prelim/scaler.hpp"

#include <algorithm>

#include "prelim/errors.hpp"

namespace prelim {

Scaler Scaler::fit(const Dataset& train) {
    Scaler s;
    const Matrix& x = train.x();
    s.mins_.assign(x.cols(), 0.0);
    s.maxs_.assign(x.cols(), 0.0);
    for (std::size_t c = 0; c < x.cols(); ++c) {
        double lo = x.at(0, c);
        double hi = x.at(0, c);
        for (std::size_t r = 1; r < x.rows(); ++r) {
            lo = std::min(lo, x.at(r, c));
            hi = std::max(hi, x.at(r, c));
        }
        s.mins_[c] = lo;
        s.maxs_[c] = hi;
    }
    return s;
}

Matrix Scaler::transform(const Matrix& x) const {
    if (x.cols() != mins_.size()) throw DimensionMismatch("scaler: column count mismatch");
    Matrix out(x.rows(), x.cols());
    for (std::size_t c = 0; c < x.cols(); ++c) {
        const double range = maxs_[c] - mins_[c];
        for (std::size_t r = 0; r < x.rows(); ++r) {
            out.at(r, c) = range > 0.0 ? (x.at(r, c) - mins_[c]) / range : 0.0;
        }
    }
    return out;
}

Dataset Scaler::transform(const Dataset& d) const {
    return Dataset(transform(d.x()), d.y(), d.feature_names(), d.label_kind());
}

Matrix Scaler::inverse_transform(const Matrix& x) const {
    if (x.cols() != mins_.size()) throw DimensionMismatch("scaler: column count mismatch");
    Matrix out(x.rows(), x.cols());
    for (std::size_t c = 0; c < x.cols(); ++c) {
        const double range = maxs_[c] - mins_[c];
        for (std::size_t r = 0; r < x.rows(); ++r) {
            out.at(r, c) = range > 0.0 ? x.at(r, c) * range + mins_[c] : mins_[c];
        }
    }
    return out;
}

Scaler fit_scaler(const Dataset& train) {
    return Scaler::fit(train);
}

Dataset apply_scaler(const Scaler& s, const Dataset& d) {
    return s.transform(d);
}

}  // namespace prelim
