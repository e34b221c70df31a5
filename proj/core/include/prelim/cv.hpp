#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "prelim/matrix.hpp"

namespace prelim {

// Row indices sorted lexicographically by feature vector then target.
// Seeded index operations (fold assignment, grow/prune splits) run on this
// order so learners are invariant to the physical row order of their input.
std::vector<std::size_t> canonical_order(const Matrix& x, std::span<const double> y);

// Stratified k-fold assignment: fold id per row. Classes are dealt
// round-robin after a seeded shuffle of the canonical order. Falls back to
// plain dealing when a class has fewer rows than folds.
std::vector<std::size_t> stratified_folds(const Matrix& x, std::span<const double> y,
                                          std::size_t k, std::uint64_t seed);

}  // namespace prelim
