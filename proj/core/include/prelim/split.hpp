#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "prelim/dataset.hpp"

namespace prelim {

// K train/test index splits with minimal train-set overlap: the row order is
// shuffled once per seed and train sets are carved as consecutive
// n_train-sized windows with wrap-around, so each row lands in at most
// ceil(K*n_train/N) train sets.
struct SplitPlan {
    std::size_t n_train = 0;
    std::size_t k = 0;
    // Per split: (train indices, test indices); test = complement of train.
    std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> splits;
};

SplitPlan make_splits(std::size_t n_total, std::size_t n_train, std::size_t k,
                      std::uint64_t seed);
SplitPlan make_splits(const Dataset& d, std::size_t n_train, std::size_t k, std::uint64_t seed);

}  // namespace prelim
