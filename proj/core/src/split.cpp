#include "prelim/split.hpp"

#include <algorithm>
#include <numeric>

#include "prelim/errors.hpp"
#include "prelim/rng.hpp"

namespace prelim {

SplitPlan make_splits(std::size_t n_total, std::size_t n_train, std::size_t k,
                      std::uint64_t seed) {
    if (n_train == 0 || n_train >= n_total) {
        throw TooSmall("make_splits: need 0 < n_train < " + std::to_string(n_total));
    }
    if (k == 0) throw TooSmall("make_splits: k must be >= 1");

    std::vector<std::size_t> order(n_total);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order);

    SplitPlan plan;
    plan.n_train = n_train;
    plan.k = k;
    plan.splits.reserve(k);

    std::vector<char> in_train(n_total);
    for (std::size_t s = 0; s < k; ++s) {
        std::fill(in_train.begin(), in_train.end(), 0);
        std::vector<std::size_t> train(n_train);
        const std::size_t start = (s * n_train) % n_total;
        for (std::size_t i = 0; i < n_train; ++i) {
            const std::size_t idx = order[(start + i) % n_total];
            train[i] = idx;
            in_train[idx] = 1;
        }
        std::sort(train.begin(), train.end());
        std::vector<std::size_t> test;
        test.reserve(n_total - n_train);
        for (std::size_t i = 0; i < n_total; ++i) {
            if (!in_train[i]) test.push_back(i);
        }
        plan.splits.emplace_back(std::move(train), std::move(test));
    }
    return plan;
}

SplitPlan make_splits(const Dataset& d, std::size_t n_train, std::size_t k, std::uint64_t seed) {
    return make_splits(d.n_rows(), n_train, k, seed);
}

}  // namespace prelim
