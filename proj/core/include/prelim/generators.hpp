#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "prelim/classifier.hpp"
#include "prelim/dataset.hpp"
#include "prelim/forest.hpp"
#include "prelim/gmm.hpp"
#include "prelim/rng.hpp"

namespace prelim {

enum class GeneratorKind {
    none,  // baseline marker: train the white box on D^tr alone
    dummy,
    unif,
    norm,
    gmm,
    gmmal,
    kdem,
    kde,
    kdeb,
    cmm,
    rerx,
    vva,
    smote,
    adasyn,
    munge,
    ssl,
};

std::string generator_name(GeneratorKind kind);
GeneratorKind parse_generator(const std::string& name);

// Fitted point sampler. sample(count) returns exactly `count` finite
// M-dimensional points, except for the fixed-size kinds (dummy, rerx, ssl)
// which always return their fixed set. Sampling advances the generator's own
// seeded stream; identical (data, spec, seed) reproduce identical samples.
class Generator {
  public:
    virtual ~Generator() = default;

    virtual GeneratorKind kind() const = 0;
    virtual std::size_t n_features() const = 0;
    virtual Matrix sample(std::size_t count) = 0;

    virtual std::optional<std::size_t> fixed_size() const { return std::nullopt; }

    // Pool rows taken by the ssl generator; the harness drops them from the
    // evaluation set.
    virtual std::vector<std::size_t> consumed_indices() const { return {}; }

    // Non-empty when a documented fallback replaced the requested behavior
    // (rerx with no correct rows, adasyn with no usable neighborhood, vva
    // with a single predicted class).
    const std::string& fallback_note() const { return fallback_note_; }

  protected:
    std::string fallback_note_;
};

// h = 0.9*A/N^(1/5), A = min(sqrt(Var), IQR/1.349), floored at 1e-6 so
// constant features stay sampleable.
double silverman_bandwidth(std::span<const double> values);

// Isotropic bandwidth of the joint KDE: mean of the per-feature Silverman
// bandwidths (the noise standard deviation added per coordinate).
double kde_isotropic_bandwidth(const Matrix& x);

// Ball radius for the ball-noise sampler: average distance of rows to their
// 10-th nearest neighbor, falling back to the (N-1)-th for tiny data.
double kdeb_ball_radius(const Matrix& x);

std::unique_ptr<Generator> fit_simple(const Dataset& d, GeneratorKind kind, std::uint64_t seed);

std::unique_ptr<Generator> fit_kde_family(const Dataset& d, GeneratorKind kind,
                                          std::uint64_t seed);

std::unique_ptr<Generator> fit_gmm_generator(const Dataset& d, bool diagonal_only,
                                             std::uint64_t seed, const GmmOptions& options = {});

// Axis-aligned leaf regions of the forest, selection probability proportional
// to the number of train rows each region covers.
struct CmmRegion {
    std::vector<double> low;
    std::vector<double> high;
    std::vector<char> open_low;  // lower bound came from a strict > test
    double weight = 0.0;
};

class CmmGenerator final : public Generator {
  public:
    CmmGenerator(const Dataset& d, const ForestModel& forest, std::uint64_t seed);

    GeneratorKind kind() const override { return GeneratorKind::cmm; }
    std::size_t n_features() const override { return n_features_; }
    Matrix sample(std::size_t count) override;

    const std::vector<CmmRegion>& regions() const { return regions_; }
    // Region index that produced each point of the latest sample() call.
    const std::vector<std::size_t>& source_trace() const { return source_trace_; }

  private:
    std::vector<CmmRegion> regions_;
    std::vector<double> cumulative_;
    std::vector<std::size_t> source_trace_;
    std::size_t n_features_ = 0;
    Rng rng_;
};

std::unique_ptr<Generator> fit_cmm(const Dataset& d, const ForestModel& forest,
                                   std::uint64_t seed);

std::unique_ptr<Generator> fit_rerx(const Dataset& d, const Classifier& bb, std::uint64_t seed);

class VvaGenerator final : public Generator {
  public:
    VvaGenerator(const Dataset& d, const Classifier& bb, std::uint64_t seed,
                 double nv_ratio = 0.2);

    GeneratorKind kind() const override { return GeneratorKind::vva; }
    std::size_t n_features() const override { return n_features_; }
    Matrix sample(std::size_t count) override;

    // In fallback mode the generator degenerates to dummy with L = N.
    std::optional<std::size_t> fixed_size() const override {
        if (pairs_.empty()) return train_points_.rows();
        return std::nullopt;
    }

    // Nearest opposite-predicted-class pairs, ascending by distance. Empty
    // when the dummy fallback engaged.
    const std::vector<std::pair<std::size_t, std::size_t>>& pairs() const { return pairs_; }

  private:
    Matrix train_points_;
    std::vector<std::pair<std::size_t, std::size_t>> pairs_;
    std::size_t n_features_ = 0;
    std::size_t cursor_ = 0;
    Rng rng_;
};

std::unique_ptr<Generator> fit_vva(const Dataset& d, const Classifier& bb, std::uint64_t seed);

// Oversampling generators on the artificial two-class problem: train rows are
// the minority, an equal count of uniform points the majority. smote
// interpolates each cycled train row with one of its k nearest train
// neighbors using a single per-point gap; adasyn allocates per-row quotas
// proportional to the majority share among the k nearest combined points,
// escalating k by 5 up to min(20, N-1) and falling back to smote when no
// neighborhood sees the majority.
class SmoteFamilyGenerator final : public Generator {
  public:
    SmoteFamilyGenerator(const Dataset& d, GeneratorKind kind, std::uint64_t seed,
                         std::size_t k = 5);

    GeneratorKind kind() const override { return requested_; }
    std::size_t n_features() const override { return x_.cols(); }
    Matrix sample(std::size_t count) override;

    // adasyn emission counts per train row for a draw of `count` points;
    // all zero in smote mode or after the fallback.
    std::vector<std::size_t> quotas(std::size_t count) const;

  private:
    Matrix x_;
    Matrix majority_;
    std::vector<std::vector<std::size_t>> minority_knn_;
    std::vector<double> ratios_;
    GeneratorKind requested_;
    std::size_t k_;
    Rng rng_;
};

std::unique_ptr<Generator> fit_smote_family(const Dataset& d, GeneratorKind kind,
                                            std::uint64_t seed, std::size_t k = 5);

std::unique_ptr<Generator> fit_munge(const Dataset& d, double p, double s, std::uint64_t seed);

// L = min(10^4 - n_train, floor((dataset_size - n_train)/2)) distinct pool
// rows, drawn without replacement.
std::unique_ptr<Generator> fit_ssl(const Matrix& pool, std::size_t n_train,
                                   std::size_t dataset_size, std::uint64_t seed);

}  // namespace prelim
