#include "prelim/cv.hpp"

#include <algorithm>
#include <numeric>

#include "prelim/rng.hpp"

namespace prelim {

std::vector<std::size_t> canonical_order(const Matrix& x, std::span<const double> y) {
    std::vector<std::size_t> order(x.rows());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        for (std::size_t c = 0; c < x.cols(); ++c) {
            if (x.at(a, c) != x.at(b, c)) return x.at(a, c) < x.at(b, c);
        }
        return y[a] < y[b];
    });
    return order;
}

std::vector<std::size_t> stratified_folds(const Matrix& x, std::span<const double> y,
                                          std::size_t k, std::uint64_t seed) {
    const std::size_t n = x.rows();
    std::vector<std::size_t> fold(n, 0);
    if (k < 2 || n < 2) return fold;
    k = std::min(k, n);

    std::vector<std::size_t> order = canonical_order(x, y);
    Rng rng(seed);
    rng.shuffle(order);

    bool stratify = true;
    std::size_t pos = 0;
    for (double t : y) pos += t >= 0.5;
    if (pos < k || n - pos < k) stratify = false;

    if (stratify) {
        std::size_t next[2] = {0, 0};
        for (std::size_t idx : order) {
            const int cls = y[idx] >= 0.5 ? 1 : 0;
            fold[idx] = next[cls] % k;
            ++next[cls];
        }
    } else {
        std::size_t next = 0;
        for (std::size_t idx : order) fold[idx] = next++ % k;
    }
    return fold;
}

}  // namespace prelim
