#pragma once

#include <cstdint>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace prelim {

// Deterministic random source used everywhere results must reproduce
// byte-for-byte across runs and platforms. Standard-library distributions are
// implementation-defined, so uniform/normal draws are generated by hand on top
// of xoshiro256** seeded through splitmix64.
class Rng {
  public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    // Uniform on [0, 1), 53-bit resolution.
    double uniform();
    double uniform(double lo, double hi);

    // Standard normal via Box-Muller; consumes two uniforms per call.
    double normal();
    double normal(double mean, double stddev);

    // Uniform index in [0, n); n must be > 0.
    std::size_t index(std::size_t n);

    // Fisher-Yates in-place shuffle.
    template <typename T>
    void shuffle(std::vector<T>& items) {
        if (items.size() < 2) return;
        for (std::size_t i = items.size() - 1; i > 0; --i) {
            const std::size_t j = index(i + 1);
            std::swap(items[i], items[j]);
        }
    }

    // Independent stream derived from this one's seed and a tag. The parent's
    // state is not advanced.
    Rng fork(std::uint64_t tag) const;

  private:
    std::uint64_t state_[4];
    std::uint64_t seed_;
};

// Stable seed combinator for deriving per-task seeds from coordinates.
std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts);

}  // namespace prelim
