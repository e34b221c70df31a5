#pragma once

#include <cstdint>
#include <string>

#include "prelim/dataset.hpp"

namespace prelim {

// Deterministic labeled datasets with known Bayes-optimal structure, used by
// the benchmark harness and the acceptance suite.
//   two-gaussians: 4 features, classes split along x1 with a clear margin;
//                  one informative feature, three nuisance ones.
//   rings:         2 features, class 1 inside a disc, class 0 in an annulus
//                  separated by a radial margin.
//   checkerboard:  2 features, 4x4 alternating cells on [0,4]^2 with interior
//                  margins; a perfect tree needs 16 leaves.
// noise flips each label independently with the given probability.
Dataset make_synthetic(const std::string& spec, std::size_t size, double noise,
                       std::uint64_t seed);

}  // namespace prelim
