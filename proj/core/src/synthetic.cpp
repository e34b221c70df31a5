#include "prelim/synthetic.hpp"

#include <cmath>

#include "prelim/errors.hpp"
#include "prelim/rng.hpp"

namespace prelim {

namespace {

Dataset two_gaussians(std::size_t size, double noise, Rng& rng) {
    Matrix x(size, 4);
    std::vector<double> y(size);
    for (std::size_t r = 0; r < size; ++r) {
        const bool positive = rng.uniform() < 0.5;
        // A wide margin around zero keeps noise-free data separable on x1
        // with the split threshold inside the gap.
        double v = rng.normal(positive ? 2.0 : -2.0, 0.8);
        while (std::abs(v) < 1.0) v = rng.normal(positive ? 2.0 : -2.0, 0.8);
        x.at(r, 0) = v;
        x.at(r, 1) = rng.normal(0.0, 1.0);
        x.at(r, 2) = rng.normal(0.0, 1.0);
        x.at(r, 3) = rng.normal(0.0, 1.0);
        const bool flip = rng.uniform() < noise;
        y[r] = (positive != flip) ? 1.0 : 0.0;
    }
    return Dataset(std::move(x), std::move(y), {"x1", "x2", "x3", "x4"});
}

Dataset rings(std::size_t size, double noise, Rng& rng) {
    Matrix x(size, 2);
    std::vector<double> y(size);
    for (std::size_t r = 0; r < size; ++r) {
        const bool positive = rng.uniform() < 0.5;
        const double radius = positive ? 0.9 * std::sqrt(rng.uniform())
                                       : std::sqrt(rng.uniform(1.15 * 1.15, 4.0));
        const double angle = rng.uniform(0.0, 6.283185307179586);
        x.at(r, 0) = radius * std::cos(angle);
        x.at(r, 1) = radius * std::sin(angle);
        const bool flip = rng.uniform() < noise;
        y[r] = (positive != flip) ? 1.0 : 0.0;
    }
    return Dataset(std::move(x), std::move(y), {"x1", "x2"});
}

Dataset checkerboard(std::size_t size, double noise, Rng& rng) {
    Matrix x(size, 2);
    std::vector<double> y(size);
    for (std::size_t r = 0; r < size; ++r) {
        const std::size_t cx = rng.index(4);
        const std::size_t cy = rng.index(4);
        // Interior offsets keep a margin at every cell boundary.
        x.at(r, 0) = static_cast<double>(cx) + 0.02 + 0.96 * rng.uniform();
        x.at(r, 1) = static_cast<double>(cy) + 0.02 + 0.96 * rng.uniform();
        const bool positive = (cx + cy) % 2 == 1;
        const bool flip = rng.uniform() < noise;
        y[r] = (positive != flip) ? 1.0 : 0.0;
    }
    return Dataset(std::move(x), std::move(y), {"x1", "x2"});
}

}  // namespace

Dataset make_synthetic(const std::string& spec, std::size_t size, double noise,
                       std::uint64_t seed) {
    if (size < 200) throw TooSmall("make_synthetic: size must be >= 200");
    if (!(noise >= 0.0 && noise < 0.5)) {
        throw InvalidHyperparameter("make_synthetic: noise must be in [0, 0.5)");
    }
    Rng rng(mix_seed({seed, 0x5f17}));
    if (spec == "two-gaussians") return two_gaussians(size, noise, rng);
    if (spec == "rings") return rings(size, noise, rng);
    if (spec == "checkerboard") return checkerboard(size, noise, rng);
    throw UnknownSpec("make_synthetic: unknown spec '" + spec + "'");
}

}  // namespace prelim
