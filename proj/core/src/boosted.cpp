#include "prelim/boosted.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "prelim/cv.hpp"
#include "prelim/errors.hpp"
#include "prelim/metrics.hpp"
#include "prelim/rng.hpp"

namespace prelim {

namespace {

constexpr double kLambda = 1.0;          // L2 on leaf weights
constexpr double kMinChildHessian = 1.0;  // minimum hessian mass per child
constexpr std::size_t kMaxDepth = 6;

double sigmoid(double z) {
    return 1.0 / (1.0 + std::exp(-z));
}

// Regression tree on (gradient, hessian) pairs, XGBoost-style gain:
// 0.5*(GL^2/(HL+l) + GR^2/(HR+l) - G^2/(H+l)); a split must clear gamma.
struct StageBuilder {
    const Matrix& x;
    std::span<const double> grad;
    std::span<const double> hess;
    double gamma;
    std::vector<TreeNode> nodes;

    std::int32_t build(std::vector<std::uint32_t> rows, std::size_t depth) {
        double g_sum = 0.0;
        double h_sum = 0.0;
        for (std::uint32_t r : rows) {
            g_sum += grad[r];
            h_sum += hess[r];
        }

        TreeNode node;
        node.count = static_cast<std::uint32_t>(rows.size());
        node.weight = h_sum;
        node.prob1 = -g_sum / (h_sum + kLambda);  // leaf value (log-odds step)
        const std::int32_t id = static_cast<std::int32_t>(nodes.size());
        nodes.push_back(node);

        if (depth >= kMaxDepth || rows.size() < 2) return id;

        const double parent_score = g_sum * g_sum / (h_sum + kLambda);
        double best_gain = 0.0;
        std::int32_t best_feature = -1;
        double best_threshold = 0.0;

        std::vector<std::pair<double, std::uint32_t>> vals;
        vals.reserve(rows.size());
        for (std::size_t f = 0; f < x.cols(); ++f) {
            vals.clear();
            for (std::uint32_t r : rows) vals.emplace_back(x.at(r, f), r);
            std::sort(vals.begin(), vals.end());

            double gl = 0.0;
            double hl = 0.0;
            std::size_t i = 0;
            while (i < vals.size()) {
                const double v = vals[i].first;
                while (i < vals.size() && vals[i].first == v) {
                    gl += grad[vals[i].second];
                    hl += hess[vals[i].second];
                    ++i;
                }
                if (i == vals.size()) break;
                const double gr = g_sum - gl;
                const double hr = h_sum - hl;
                if (hl < kMinChildHessian || hr < kMinChildHessian) continue;
                const double gain =
                    0.5 * (gl * gl / (hl + kLambda) + gr * gr / (hr + kLambda) - parent_score);
                if (gain > gamma && gain > best_gain) {
                    best_gain = gain;
                    best_feature = static_cast<std::int32_t>(f);
                    best_threshold = v + 0.5 * (vals[i].first - v);
                }
            }
        }
        if (best_feature < 0) return id;

        std::vector<std::uint32_t> left_rows;
        std::vector<std::uint32_t> right_rows;
        for (std::uint32_t r : rows) {
            (x.at(r, static_cast<std::size_t>(best_feature)) <= best_threshold ? left_rows
                                                                               : right_rows)
                .push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();
        const std::int32_t left = build(std::move(left_rows), depth + 1);
        const std::int32_t right = build(std::move(right_rows), depth + 1);
        nodes[id].feature = best_feature;
        nodes[id].threshold = best_threshold;
        nodes[id].left = left;
        nodes[id].right = right;
        return id;
    }
};

double stage_value(const std::vector<TreeNode>& nodes, std::span<const double> row) {
    std::size_t id = 0;
    while (!nodes[id].is_leaf()) {
        const TreeNode& n = nodes[id];
        id = row[static_cast<std::size_t>(n.feature)] <= n.threshold
                 ? static_cast<std::size_t>(n.left)
                 : static_cast<std::size_t>(n.right);
    }
    return nodes[id].prob1;
}

void validate(const BtParams& p) {
    if (p.n_estimators < 10 || p.n_estimators > 990) {
        throw InvalidHyperparameter("bt: n_estimators outside [10, 990]");
    }
    if (p.learning_rate < 0.0001 || p.learning_rate > 0.2) {
        throw InvalidHyperparameter("bt: learning_rate outside [0.0001, 0.2]");
    }
    if (p.gamma < 0.0 || p.gamma > 0.4) throw InvalidHyperparameter("bt: gamma outside [0, 0.4]");
    if (p.subsample < 0.5 || p.subsample > 1.0) {
        throw InvalidHyperparameter("bt: subsample outside [0.5, 1]");
    }
}

}  // namespace

double BoostedModel::score_row(std::span<const double> row) const {
    double z = base_;
    for (const auto& stage : stages_) z += params_.learning_rate * stage_value(stage, row);
    return sigmoid(z);
}

BoostedModel bt_fit_params(const Dataset& d, const BtParams& params, bool weighted,
                           std::uint64_t seed) {
    validate(params);

    const std::size_t n = d.n_rows();
    std::vector<double> w(n, 1.0);
    if (weighted) {
        const auto [w0, w1] = minority_weights(d.y());
        for (std::size_t i = 0; i < n; ++i) w[i] = d.y()[i] >= 0.5 ? w1 : w0;
    }

    double pos_w = 0.0;
    double total_w = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        pos_w += w[i] * d.y()[i];
        total_w += w[i];
    }
    const double base_rate = std::clamp(pos_w / total_w, 1e-6, 1.0 - 1e-6);

    BoostedModel model;
    model.params_ = params;
    model.n_features_ = d.n_cols();
    model.base_ = std::log(base_rate / (1.0 - base_rate));
    model.staged_loss_.reserve(params.n_estimators);

    std::vector<double> margin(n, model.base_);
    std::vector<double> grad(n);
    std::vector<double> hess(n);
    Rng rng(seed);

    for (std::size_t stage = 0; stage < params.n_estimators; ++stage) {
        for (std::size_t i = 0; i < n; ++i) {
            const double p = sigmoid(margin[i]);
            grad[i] = w[i] * (p - d.y()[i]);
            hess[i] = w[i] * std::max(p * (1.0 - p), 1e-16);
        }

        std::vector<std::uint32_t> rows(n);
        std::iota(rows.begin(), rows.end(), 0);
        if (params.subsample < 1.0) {
            const std::size_t keep = std::max<std::size_t>(
                1, static_cast<std::size_t>(std::floor(params.subsample * static_cast<double>(n))));
            for (std::size_t i = 0; i < keep; ++i) {
                const std::size_t j = i + rng.index(rows.size() - i);
                std::swap(rows[i], rows[j]);
            }
            rows.resize(keep);
            std::sort(rows.begin(), rows.end());
        }

        StageBuilder builder{d.x(), grad, hess, params.gamma, {}};
        builder.build(std::move(rows), 0);
        model.stages_.push_back(std::move(builder.nodes));

        double loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            margin[i] += params.learning_rate * stage_value(model.stages_.back(), d.row(i));
            const double p = std::clamp(sigmoid(margin[i]), 1e-15, 1.0 - 1e-15);
            loss -= w[i] * (d.y()[i] * std::log(p) + (1.0 - d.y()[i]) * std::log(1.0 - p));
        }
        model.staged_loss_.push_back(loss);
    }
    return model;
}

BoostedModel bt_fit(const Dataset& d, const BtSearchSpace& space, bool weighted,
                    std::uint64_t seed) {
    if (space.draws == 0) throw InvalidHyperparameter("bt_fit: draws must be >= 1");

    Rng rng(mix_seed({seed, 0xb7d4a3}));
    std::vector<BtParams> draws(space.draws);
    for (auto& p : draws) {
        p.n_estimators = space.n_estimators_lo +
                         rng.index(space.n_estimators_hi - space.n_estimators_lo + 1);
        p.learning_rate = rng.uniform(space.learning_rate_lo, space.learning_rate_hi);
        p.gamma = rng.uniform(space.gamma_lo, space.gamma_hi);
        p.subsample = rng.uniform(space.subsample_lo, space.subsample_hi);
    }

    std::size_t best = 0;
    if (draws.size() > 1) {
        const auto folds = stratified_folds(d.x(), d.y(), 5, mix_seed({seed, 0xf01d5}));
        const std::size_t n_folds = 1 + *std::max_element(folds.begin(), folds.end());
        double best_score = -1.0;
        for (std::size_t di = 0; di < draws.size(); ++di) {
            double score_sum = 0.0;
            std::size_t scored = 0;
            for (std::size_t f = 0; f < n_folds; ++f) {
                std::vector<std::size_t> tr, va;
                for (std::size_t i = 0; i < folds.size(); ++i) {
                    (folds[i] == f ? va : tr).push_back(i);
                }
                if (tr.empty() || va.empty()) continue;
                const Dataset dtr = d.subset(tr);
                if (!dtr.both_classes_present()) continue;
                const Dataset dva = d.subset(va);
                const BoostedModel m =
                    bt_fit_params(dtr, draws[di], weighted, mix_seed({seed, di, f}));
                const auto pred = m.predict(dva.x());
                std::vector<int> truth(dva.n_rows());
                for (std::size_t i = 0; i < truth.size(); ++i) truth[i] = dva.y()[i] >= 0.5;
                score_sum += weighted ? balanced_accuracy(pred, truth) : accuracy(pred, truth);
                ++scored;
            }
            const double score = scored > 0 ? score_sum / static_cast<double>(scored) : 0.0;
            if (score > best_score) {
                best_score = score;
                best = di;
            }
        }
    }
    return bt_fit_params(d, draws[best], weighted, mix_seed({seed, 0xf17a1}));
}

}  // namespace prelim
