#include "prelim/generators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "prelim/errors.hpp"
#include "prelim/metrics.hpp"

namespace prelim {

namespace {

constexpr double kBandwidthFloor = 1e-6;

double euclidean(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

std::vector<double> feature_mins(const Matrix& x) {
    std::vector<double> lo(x.cols());
    for (std::size_t c = 0; c < x.cols(); ++c) {
        lo[c] = x.at(0, c);
        for (std::size_t r = 1; r < x.rows(); ++r) lo[c] = std::min(lo[c], x.at(r, c));
    }
    return lo;
}

std::vector<double> feature_maxs(const Matrix& x) {
    std::vector<double> hi(x.cols());
    for (std::size_t c = 0; c < x.cols(); ++c) {
        hi[c] = x.at(0, c);
        for (std::size_t r = 1; r < x.rows(); ++r) hi[c] = std::max(hi[c], x.at(r, c));
    }
    return hi;
}

// Replays a fixed point set; backs dummy, rerx, and the documented fallbacks.
class ReplayGenerator final : public Generator {
  public:
    ReplayGenerator(GeneratorKind kind, Matrix points, std::string note)
        : points_(std::move(points)), kind_(kind) {
        fallback_note_ = std::move(note);
    }

    GeneratorKind kind() const override { return kind_; }
    std::size_t n_features() const override { return points_.cols(); }
    std::optional<std::size_t> fixed_size() const override { return points_.rows(); }

    Matrix sample(std::size_t count) override {
        if (count == points_.rows()) return points_;
        Matrix out(count, points_.cols());
        for (std::size_t r = 0; r < count; ++r) {
            const auto src = points_.row(r % points_.rows());
            for (std::size_t c = 0; c < points_.cols(); ++c) out.at(r, c) = src[c];
        }
        return out;
    }

  private:
    Matrix points_;
    GeneratorKind kind_;
};

class UnifGenerator final : public Generator {
  public:
    UnifGenerator(const Matrix& x, std::uint64_t seed)
        : lo_(feature_mins(x)), hi_(feature_maxs(x)), rng_(mix_seed({seed, 0x41f})) {}

    GeneratorKind kind() const override { return GeneratorKind::unif; }
    std::size_t n_features() const override { return lo_.size(); }

    Matrix sample(std::size_t count) override {
        Matrix out(count, lo_.size());
        for (std::size_t r = 0; r < count; ++r) {
            for (std::size_t c = 0; c < lo_.size(); ++c) {
                out.at(r, c) = rng_.uniform(lo_[c], hi_[c]);
            }
        }
        return out;
    }

  private:
    std::vector<double> lo_, hi_;
    Rng rng_;
};

class NormGenerator final : public Generator {
  public:
    NormGenerator(const Matrix& x, std::uint64_t seed) : rng_(mix_seed({seed, 0x62a})) {
        const std::size_t n = x.rows();
        mean_.assign(x.cols(), 0.0);
        std_.assign(x.cols(), 0.0);
        for (std::size_t c = 0; c < x.cols(); ++c) {
            double sum = 0.0;
            for (std::size_t r = 0; r < n; ++r) sum += x.at(r, c);
            mean_[c] = sum / static_cast<double>(n);
            if (n > 1) {
                double ss = 0.0;
                for (std::size_t r = 0; r < n; ++r) {
                    const double d = x.at(r, c) - mean_[c];
                    ss += d * d;
                }
                std_[c] = std::sqrt(ss / static_cast<double>(n - 1));
            }
        }
    }

    GeneratorKind kind() const override { return GeneratorKind::norm; }
    std::size_t n_features() const override { return mean_.size(); }

    Matrix sample(std::size_t count) override {
        Matrix out(count, mean_.size());
        for (std::size_t r = 0; r < count; ++r) {
            for (std::size_t c = 0; c < mean_.size(); ++c) {
                out.at(r, c) = rng_.normal(mean_[c], std_[c]);
            }
        }
        return out;
    }

  private:
    std::vector<double> mean_, std_;
    Rng rng_;
};

class KdemGenerator final : public Generator {
  public:
    KdemGenerator(const Matrix& x, std::uint64_t seed)
        : x_(x), rng_(mix_seed({seed, 0xd31})) {
        bandwidths_.resize(x.cols());
        for (std::size_t c = 0; c < x.cols(); ++c) {
            bandwidths_[c] = silverman_bandwidth(x.column(c));
        }
    }

    GeneratorKind kind() const override { return GeneratorKind::kdem; }
    std::size_t n_features() const override { return x_.cols(); }

    Matrix sample(std::size_t count) override {
        Matrix out(count, x_.cols());
        for (std::size_t r = 0; r < count; ++r) {
            for (std::size_t c = 0; c < x_.cols(); ++c) {
                const std::size_t idx = rng_.index(x_.rows());
                out.at(r, c) = x_.at(idx, c) + bandwidths_[c] * rng_.normal();
            }
        }
        return out;
    }

  private:
    Matrix x_;
    std::vector<double> bandwidths_;
    Rng rng_;
};

class KdeGenerator final : public Generator {
  public:
    KdeGenerator(const Matrix& x, std::uint64_t seed)
        : x_(x), bandwidth_(kde_isotropic_bandwidth(x)), rng_(mix_seed({seed, 0xde})) {}

    GeneratorKind kind() const override { return GeneratorKind::kde; }
    std::size_t n_features() const override { return x_.cols(); }
    double bandwidth() const { return bandwidth_; }

    Matrix sample(std::size_t count) override {
        Matrix out(count, x_.cols());
        for (std::size_t r = 0; r < count; ++r) {
            const std::size_t idx = rng_.index(x_.rows());
            for (std::size_t c = 0; c < x_.cols(); ++c) {
                out.at(r, c) = x_.at(idx, c) + bandwidth_ * rng_.normal();
            }
        }
        return out;
    }

  private:
    Matrix x_;
    double bandwidth_ = 0.0;
    Rng rng_;
};

class KdebGenerator final : public Generator {
  public:
    KdebGenerator(const Matrix& x, std::uint64_t seed)
        : x_(x), radius_(kdeb_ball_radius(x)), rng_(mix_seed({seed, 0xba11})) {}

    GeneratorKind kind() const override { return GeneratorKind::kdeb; }
    std::size_t n_features() const override { return x_.cols(); }
    double radius() const { return radius_; }

    Matrix sample(std::size_t count) override {
        const std::size_t m = x_.cols();
        Matrix out(count, m);
        std::vector<double> dir(m);
        for (std::size_t r = 0; r < count; ++r) {
            const std::size_t idx = rng_.index(x_.rows());
            double norm = 0.0;
            for (std::size_t c = 0; c < m; ++c) {
                dir[c] = rng_.normal();
                norm += dir[c] * dir[c];
            }
            norm = std::sqrt(norm);
            const double len =
                radius_ * std::pow(rng_.uniform(), 1.0 / static_cast<double>(m));
            double scale = norm > 0.0 ? len / norm : 0.0;
            // Clamp so the support claim |offset| <= r holds exactly.
            double off_norm = 0.0;
            for (std::size_t c = 0; c < m; ++c) off_norm += (dir[c] * scale) * (dir[c] * scale);
            off_norm = std::sqrt(off_norm);
            if (off_norm > radius_ && off_norm > 0.0) scale *= radius_ / off_norm;
            for (std::size_t c = 0; c < m; ++c) out.at(r, c) = x_.at(idx, c) + dir[c] * scale;
        }
        return out;
    }

  private:
    Matrix x_;
    double radius_ = 0.0;
    Rng rng_;
};

class GmmGenerator final : public Generator {
  public:
    GmmGenerator(const Matrix& x, bool diagonal_only, std::uint64_t seed,
                 const GmmOptions& options)
        : diagonal_only_(diagonal_only), rng_(mix_seed({seed, 0x9996})) {
        GmmOptions opts = options;
        opts.diagonal_only = diagonal_only;
        mixture_ = gmm_select_bic(x, opts, mix_seed({seed, 0x9997}));
        n_features_ = x.cols();
    }

    GeneratorKind kind() const override {
        return diagonal_only_ ? GeneratorKind::gmmal : GeneratorKind::gmm;
    }
    std::size_t n_features() const override { return n_features_; }
    const GaussianMixture& mixture() const { return mixture_; }

    Matrix sample(std::size_t count) override {
        Matrix out(count, n_features_);
        for (std::size_t r = 0; r < count; ++r) {
            const auto p = mixture_.sample_point(rng_);
            for (std::size_t c = 0; c < n_features_; ++c) out.at(r, c) = p[c];
        }
        return out;
    }

  private:
    GaussianMixture mixture_;
    bool diagonal_only_;
    std::size_t n_features_;
    Rng rng_;
};

class MungeGenerator final : public Generator {
  public:
    MungeGenerator(const Matrix& x, double p, double s, std::uint64_t seed)
        : x_(x), p_(p), s_(s), rng_(mix_seed({seed, 0x3159e})) {
        if (x.rows() < 2) throw TooFewPoints("munge: need at least two rows");
        if (!(p >= 0.0 && p <= 1.0) || s <= 0.0) {
            throw InvalidHyperparameter("munge: need P in [0,1] and s > 0");
        }
        nn_distance_.resize(x.rows());
        for (std::size_t i = 0; i < x.rows(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < x.rows(); ++j) {
                if (j == i) continue;
                best = std::min(best, euclidean(x.row(i), x.row(j)));
            }
            nn_distance_[i] = best;
        }
    }

    GeneratorKind kind() const override { return GeneratorKind::munge; }
    std::size_t n_features() const override { return x_.cols(); }

    Matrix sample(std::size_t count) override {
        Matrix out(count, x_.cols());
        for (std::size_t r = 0; r < count; ++r) {
            const std::size_t src = r % x_.rows();
            const double sigma = nn_distance_[src] / s_;
            for (std::size_t c = 0; c < x_.cols(); ++c) {
                const double base = x_.at(src, c);
                out.at(r, c) = rng_.uniform() < p_ ? rng_.normal(base, sigma) : base;
            }
        }
        return out;
    }

  private:
    Matrix x_;
    std::vector<double> nn_distance_;
    double p_, s_;
    Rng rng_;
};

class SslGenerator final : public Generator {
  public:
    SslGenerator(const Matrix& pool, std::size_t n_train, std::size_t dataset_size,
                 std::uint64_t seed) {
        if (pool.rows() == 0) throw TooFewPoints("ssl: empty pool");
        const std::size_t budget_cap =
            n_train < 10000 ? 10000 - n_train : 0;  // L = 10^4 - N, never negative
        const std::size_t half_pool = (dataset_size - n_train) / 2;
        const std::size_t l = std::min({budget_cap, half_pool, pool.rows()});

        std::vector<std::size_t> order(pool.rows());
        std::iota(order.begin(), order.end(), 0);
        Rng rng(mix_seed({seed, 0x551}));
        for (std::size_t i = 0; i < l; ++i) {
            const std::size_t j = i + rng.index(order.size() - i);
            std::swap(order[i], order[j]);
        }
        order.resize(l);
        std::sort(order.begin(), order.end());
        consumed_ = order;
        points_ = pool.take_rows(consumed_);
    }

    GeneratorKind kind() const override { return GeneratorKind::ssl; }
    std::size_t n_features() const override { return points_.cols(); }
    std::optional<std::size_t> fixed_size() const override { return points_.rows(); }
    std::vector<std::size_t> consumed_indices() const override { return consumed_; }

    Matrix sample(std::size_t) override { return points_; }

  private:
    Matrix points_;
    std::vector<std::size_t> consumed_;
};

}  // namespace

std::string generator_name(GeneratorKind kind) {
    switch (kind) {
        case GeneratorKind::none: return "no";
        case GeneratorKind::dummy: return "dummy";
        case GeneratorKind::unif: return "unif";
        case GeneratorKind::norm: return "norm";
        case GeneratorKind::gmm: return "gmm";
        case GeneratorKind::gmmal: return "gmmal";
        case GeneratorKind::kdem: return "kdem";
        case GeneratorKind::kde: return "kde";
        case GeneratorKind::kdeb: return "kdeb";
        case GeneratorKind::cmm: return "cmm";
        case GeneratorKind::rerx: return "rerx";
        case GeneratorKind::vva: return "vva";
        case GeneratorKind::smote: return "smote";
        case GeneratorKind::adasyn: return "adasyn";
        case GeneratorKind::munge: return "munge";
        case GeneratorKind::ssl: return "ssl";
    }
    return "no";
}

GeneratorKind parse_generator(const std::string& name) {
    for (const GeneratorKind k :
         {GeneratorKind::none, GeneratorKind::dummy, GeneratorKind::unif, GeneratorKind::norm,
          GeneratorKind::gmm, GeneratorKind::gmmal, GeneratorKind::kdem, GeneratorKind::kde,
          GeneratorKind::kdeb, GeneratorKind::cmm, GeneratorKind::rerx, GeneratorKind::vva,
          GeneratorKind::smote, GeneratorKind::adasyn, GeneratorKind::munge,
          GeneratorKind::ssl}) {
        if (generator_name(k) == name) return k;
    }
    throw UnknownSpec("unknown generator: " + name);
}

SmoteFamilyGenerator::SmoteFamilyGenerator(const Dataset& d, GeneratorKind kind,
                                           std::uint64_t seed, std::size_t k)
    : x_(d.x()), requested_(kind), k_(k), rng_(mix_seed({seed, 0x5e07e})) {
    const std::size_t n = x_.rows();
    if (n <= k_) {
        throw TooFewPoints("smote/adasyn: need more than k=" + std::to_string(k_) +
                           " train points");
    }

    UnifGenerator unif(x_, mix_seed({seed, 0x3a10}));
    majority_ = unif.sample(n);

    minority_knn_.resize(n);
    std::vector<std::pair<double, std::size_t>> dists;
    for (std::size_t i = 0; i < n; ++i) {
        dists.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) dists.emplace_back(euclidean(x_.row(i), x_.row(j)), j);
        }
        std::sort(dists.begin(), dists.end());
        for (std::size_t t = 0; t < k_; ++t) minority_knn_[i].push_back(dists[t].second);
    }

    if (requested_ == GeneratorKind::adasyn) {
        std::size_t k_ratio = k_;
        const std::size_t k_cap = std::min<std::size_t>(20, n - 1);
        while (true) {
            ratios_.assign(n, 0.0);
            double total = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                dists.clear();
                for (std::size_t j = 0; j < n; ++j) {
                    if (j != i) dists.emplace_back(euclidean(x_.row(i), x_.row(j)), j);
                }
                for (std::size_t j = 0; j < n; ++j) {
                    dists.emplace_back(euclidean(x_.row(i), majority_.row(j)), n + j);
                }
                std::sort(dists.begin(), dists.end());
                std::size_t majority_hits = 0;
                for (std::size_t t = 0; t < k_ratio && t < dists.size(); ++t) {
                    majority_hits += dists[t].second >= n;
                }
                ratios_[i] = static_cast<double>(majority_hits) / static_cast<double>(k_ratio);
                total += ratios_[i];
            }
            if (total > 0.0) break;
            if (k_ratio + 5 > k_cap) {
                fallback_note_ = "adasyn: no majority point in any neighborhood up to k=" +
                                 std::to_string(k_ratio) + "; using smote";
                ratios_.clear();
                break;
            }
            k_ratio += 5;
        }
    }
}

std::vector<std::size_t> SmoteFamilyGenerator::quotas(std::size_t count) const {
    std::vector<std::size_t> out(x_.rows(), 0);
    double total = 0.0;
    for (double r : ratios_) total += r;
    if (total <= 0.0) return out;
    // Largest-remainder integerization so quotas sum to count exactly.
    std::vector<std::pair<double, std::size_t>> remainders(x_.rows());
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < x_.rows(); ++i) {
        const double exact = static_cast<double>(count) * ratios_[i] / total;
        out[i] = static_cast<std::size_t>(std::floor(exact));
        assigned += out[i];
        remainders[i] = {exact - std::floor(exact), i};
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (std::size_t t = 0; assigned < count; ++t, ++assigned) {
        ++out[remainders[t % remainders.size()].second];
    }
    return out;
}

Matrix SmoteFamilyGenerator::sample(std::size_t count) {
    Matrix out(count, x_.cols());
    std::size_t written = 0;
    const auto emit = [&](std::size_t src) {
        const std::size_t nb = minority_knn_[src][rng_.index(k_)];
        const double gap = rng_.uniform();
        for (std::size_t c = 0; c < x_.cols(); ++c) {
            out.at(written, c) = gap * x_.at(src, c) + (1.0 - gap) * x_.at(nb, c);
        }
        ++written;
    };

    if (requested_ == GeneratorKind::adasyn && !ratios_.empty()) {
        const auto q = quotas(count);
        for (std::size_t i = 0; i < q.size(); ++i) {
            for (std::size_t t = 0; t < q[i]; ++t) emit(i);
        }
    } else {
        for (std::size_t t = 0; t < count; ++t) emit(t % x_.rows());
    }
    return out;
}

double silverman_bandwidth(std::span<const double> values) {
    if (values.size() < 2) throw TooFewPoints("silverman_bandwidth: need at least two values");
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double var = ss / (n - 1.0);

    std::vector<double> sorted(values.begin(), values.end());
    const double iqr = quantile(sorted, 0.75) - quantile(sorted, 0.25);

    const double a = std::min(std::sqrt(var), iqr / 1.349);
    const double h = 0.9 * a / std::pow(n, 0.2);
    return std::max(h, kBandwidthFloor);
}

double kde_isotropic_bandwidth(const Matrix& x) {
    double sum = 0.0;
    for (std::size_t c = 0; c < x.cols(); ++c) sum += silverman_bandwidth(x.column(c));
    return sum / static_cast<double>(x.cols());
}

double kdeb_ball_radius(const Matrix& x) {
    const std::size_t n = x.rows();
    if (n < 2) throw TooFewPoints("kdeb_ball_radius: need at least two rows");
    const std::size_t order = std::min<std::size_t>(10, n - 1);
    double sum = 0.0;
    std::vector<double> dists(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t w = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) dists[w++] = euclidean(x.row(i), x.row(j));
        }
        std::nth_element(dists.begin(), dists.begin() + (order - 1), dists.end());
        sum += dists[order - 1];
    }
    return sum / static_cast<double>(n);
}

std::unique_ptr<Generator> fit_simple(const Dataset& d, GeneratorKind kind, std::uint64_t seed) {
    switch (kind) {
        case GeneratorKind::dummy:
            return std::make_unique<ReplayGenerator>(GeneratorKind::dummy, d.x(), "");
        case GeneratorKind::unif:
            return std::make_unique<UnifGenerator>(d.x(), seed);
        case GeneratorKind::norm:
            return std::make_unique<NormGenerator>(d.x(), seed);
        default:
            throw UnknownSpec("fit_simple: expected dummy, unif or norm");
    }
}

std::unique_ptr<Generator> fit_kde_family(const Dataset& d, GeneratorKind kind,
                                          std::uint64_t seed) {
    switch (kind) {
        case GeneratorKind::kdem:
            return std::make_unique<KdemGenerator>(d.x(), seed);
        case GeneratorKind::kde:
            return std::make_unique<KdeGenerator>(d.x(), seed);
        case GeneratorKind::kdeb:
            return std::make_unique<KdebGenerator>(d.x(), seed);
        default:
            throw UnknownSpec("fit_kde_family: expected kdem, kde or kdeb");
    }
}

std::unique_ptr<Generator> fit_gmm_generator(const Dataset& d, bool diagonal_only,
                                             std::uint64_t seed, const GmmOptions& options) {
    return std::make_unique<GmmGenerator>(d.x(), diagonal_only, seed, options);
}

CmmGenerator::CmmGenerator(const Dataset& d, const ForestModel& forest, std::uint64_t seed)
    : n_features_(d.n_cols()), rng_(mix_seed({seed, 0xc33})) {
    const std::vector<double> global_lo = feature_mins(d.x());
    const std::vector<double> global_hi = feature_maxs(d.x());

    // Leaf index -> region index, per tree, to count train coverage.
    for (const DecisionTree& tree : forest.trees()) {
        std::vector<std::size_t> region_of(tree.nodes().size(), 0);

        struct Frame {
            std::size_t node;
            std::vector<double> lo, hi;
            std::vector<char> open;
        };
        std::vector<Frame> stack;
        stack.push_back({0, global_lo, global_hi, std::vector<char>(n_features_, 0)});
        while (!stack.empty()) {
            Frame f = std::move(stack.back());
            stack.pop_back();
            const TreeNode& node = tree.nodes()[f.node];
            if (node.is_leaf()) {
                region_of[f.node] = regions_.size();
                regions_.push_back({std::move(f.lo), std::move(f.hi), std::move(f.open), 0.0});
                continue;
            }
            Frame left{static_cast<std::size_t>(node.left), f.lo, f.hi, f.open};
            const std::size_t feat = static_cast<std::size_t>(node.feature);
            left.hi[feat] = std::min(left.hi[feat], node.threshold);
            Frame right{static_cast<std::size_t>(node.right), std::move(f.lo), std::move(f.hi),
                        std::move(f.open)};
            if (node.threshold > right.lo[feat]) {
                right.lo[feat] = node.threshold;
                right.open[feat] = 1;
            }
            stack.push_back(std::move(left));
            stack.push_back(std::move(right));
        }

        // Selection mass: train rows routed to each leaf.
        for (std::size_t r = 0; r < d.n_rows(); ++r) {
            regions_[region_of[tree.leaf_for(d.row(r))]].weight += 1.0;
        }
    }

    cumulative_.resize(regions_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < regions_.size(); ++i) {
        acc += regions_[i].weight;
        cumulative_[i] = acc;
    }
}

Matrix CmmGenerator::sample(std::size_t count) {
    Matrix out(count, n_features_);
    source_trace_.assign(count, 0);
    const double total = cumulative_.back();
    for (std::size_t r = 0; r < count; ++r) {
        const double u = rng_.uniform() * total;
        const std::size_t idx = static_cast<std::size_t>(
            std::lower_bound(cumulative_.begin(), cumulative_.end(), u,
                             [](double cum, double val) { return cum <= val; }) -
            cumulative_.begin());
        const CmmRegion& region = regions_[std::min(idx, regions_.size() - 1)];
        source_trace_[r] = std::min(idx, regions_.size() - 1);
        for (std::size_t c = 0; c < n_features_; ++c) {
            double v = rng_.uniform(region.low[c], region.high[c]);
            if (region.open_low[c] && v == region.low[c] && region.high[c] > region.low[c]) {
                v = std::nextafter(region.low[c], region.high[c]);
            }
            out.at(r, c) = v;
        }
    }
    return out;
}

std::unique_ptr<Generator> fit_cmm(const Dataset& d, const ForestModel& forest,
                                   std::uint64_t seed) {
    return std::make_unique<CmmGenerator>(d, forest, seed);
}

std::unique_ptr<Generator> fit_rerx(const Dataset& d, const Classifier& bb, std::uint64_t seed) {
    (void)seed;
    const auto pred = bb.predict(d.x());
    std::vector<std::size_t> correct;
    for (std::size_t r = 0; r < d.n_rows(); ++r) {
        if (pred[r] == (d.y()[r] >= 0.5 ? 1 : 0)) correct.push_back(r);
    }
    if (correct.empty()) {
        return std::make_unique<ReplayGenerator>(
            GeneratorKind::rerx, d.x(),
            "rerx: black box misclassified every train row; replaying all train points");
    }
    return std::make_unique<ReplayGenerator>(GeneratorKind::rerx, d.x().take_rows(correct), "");
}

VvaGenerator::VvaGenerator(const Dataset& d, const Classifier& bb, std::uint64_t seed,
                           double nv_ratio)
    : train_points_(d.x()), n_features_(d.n_cols()), rng_(mix_seed({seed, 0x77a})) {
    const auto scores = bb.score(d.x());
    std::vector<int> pred(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) pred[i] = scores[i] >= 0.5 ? 1 : 0;

    bool has0 = false, has1 = false;
    for (int p : pred) (p == 1 ? has1 : has0) = true;
    if (!has0 || !has1) {
        fallback_note_ = "vva: black box predicts a single class; replaying train points";
        return;
    }

    // N_v most uncertain rows, then each one's nearest opposite-class row.
    const std::size_t n = d.n_rows();
    const std::size_t nv = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(nv_ratio * static_cast<double>(n))));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double ua = std::abs(scores[a] - 0.5);
        const double ub = std::abs(scores[b] - 0.5);
        if (ua != ub) return ua < ub;
        return a < b;
    });

    struct Pair {
        double dist;
        std::size_t a, b;
    };
    std::vector<Pair> pairs;
    for (std::size_t t = 0; t < nv && t < n; ++t) {
        const std::size_t i = order[t];
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_j = n;
        for (std::size_t j = 0; j < n; ++j) {
            if (pred[j] == pred[i]) continue;
            const double dist = euclidean(d.row(i), d.row(j));
            if (dist < best) {
                best = dist;
                best_j = j;
            }
        }
        pairs.push_back({best, i, best_j});
    }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        if (a.dist != b.dist) return a.dist < b.dist;
        if (a.a != b.a) return a.a < b.a;
        return a.b < b.b;
    });
    for (const Pair& p : pairs) pairs_.emplace_back(p.a, p.b);
}

Matrix VvaGenerator::sample(std::size_t count) {
    Matrix out(count, n_features_);
    for (std::size_t r = 0; r < count; ++r) {
        if (pairs_.empty()) {
            const auto src = train_points_.row(cursor_++ % train_points_.rows());
            for (std::size_t c = 0; c < n_features_; ++c) out.at(r, c) = src[c];
            continue;
        }
        const auto [ia, ib] = pairs_[cursor_++ % pairs_.size()];
        const double u = rng_.uniform();
        for (std::size_t c = 0; c < n_features_; ++c) {
            const double a = train_points_.at(ia, c);
            const double b = train_points_.at(ib, c);
            out.at(r, c) = a + u * (b - a);
        }
    }
    return out;
}

std::unique_ptr<Generator> fit_vva(const Dataset& d, const Classifier& bb, std::uint64_t seed) {
    return std::make_unique<VvaGenerator>(d, bb, seed);
}

std::unique_ptr<Generator> fit_smote_family(const Dataset& d, GeneratorKind kind,
                                            std::uint64_t seed, std::size_t k) {
    if (kind != GeneratorKind::smote && kind != GeneratorKind::adasyn) {
        throw UnknownSpec("fit_smote_family: expected smote or adasyn");
    }
    return std::make_unique<SmoteFamilyGenerator>(d, kind, seed, k);
}

std::unique_ptr<Generator> fit_munge(const Dataset& d, double p, double s, std::uint64_t seed) {
    return std::make_unique<MungeGenerator>(d.x(), p, s, seed);
}

std::unique_ptr<Generator> fit_ssl(const Matrix& pool, std::size_t n_train,
                                   std::size_t dataset_size, std::uint64_t seed) {
    return std::make_unique<SslGenerator>(pool, n_train, dataset_size, seed);
}

}  // namespace prelim
