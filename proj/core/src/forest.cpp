#include "prelim/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "prelim/cv.hpp"
#include "prelim/errors.hpp"
#include "prelim/metrics.hpp"
#include "prelim/rng.hpp"

namespace prelim {

ForestModel::ForestModel(std::vector<DecisionTree> trees, std::size_t n_features,
                         std::size_t max_features)
    : trees_(std::move(trees)), n_features_(n_features), max_features_(max_features) {}

double ForestModel::score_row(std::span<const double> row) const {
    double sum = 0.0;
    for (const auto& tree : trees_) sum += tree.score_row(row);
    return trees_.empty() ? 0.0 : sum / static_cast<double>(trees_.size());
}

std::vector<std::size_t> rf_feature_grid(std::size_t m) {
    std::vector<std::size_t> grid{
        std::min<std::size_t>(2, m),
        static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(m)))),
        m,
    };
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

ForestModel rf_fit(const Dataset& d, std::size_t n_trees, std::size_t max_features,
                   bool weighted, std::uint64_t seed, bool bootstrap) {
    if (max_features == 0 || max_features > d.n_cols()) {
        throw InvalidHyperparameter("rf_fit: max_features must be in [1, M]");
    }
    if (n_trees == 0) throw InvalidHyperparameter("rf_fit: n_trees must be >= 1");

    CartConfig cart;
    cart.max_features = max_features;
    if (weighted) {
        const auto [w0, w1] = minority_weights(d.y());
        cart.weight0 = w0;
        cart.weight1 = w1;
    }

    Rng rng(seed);
    const std::size_t n = d.n_rows();
    std::vector<DecisionTree> trees;
    trees.reserve(n_trees);
    for (std::size_t t = 0; t < n_trees; ++t) {
        Rng tree_rng = rng.fork(t);
        cart.seed = tree_rng.next_u64();
        if (bootstrap) {
            std::vector<std::size_t> sample(n);
            for (auto& idx : sample) idx = tree_rng.index(n);
            std::sort(sample.begin(), sample.end());
            const Dataset boot = d.subset(sample);
            trees.push_back(cart_fit(boot.x(), boot.y(), cart));
        } else {
            trees.push_back(cart_fit(d.x(), d.y(), cart));
        }
    }
    return ForestModel(std::move(trees), d.n_cols(), max_features);
}

ForestModel rf_fit_cv(const Dataset& d, std::size_t n_trees, bool weighted,
                      std::uint64_t seed) {
    const auto grid = rf_feature_grid(d.n_cols());
    std::size_t best_mf = grid.front();
    if (grid.size() > 1) {
        const auto folds = stratified_folds(d.x(), d.y(), 5, mix_seed({seed, 0xf01d5}));
        const std::size_t n_folds = 1 + *std::max_element(folds.begin(), folds.end());
        double best_score = -1.0;
        for (const std::size_t mf : grid) {
            double score_sum = 0.0;
            std::size_t scored = 0;
            for (std::size_t f = 0; f < n_folds; ++f) {
                std::vector<std::size_t> tr, va;
                for (std::size_t i = 0; i < folds.size(); ++i) {
                    (folds[i] == f ? va : tr).push_back(i);
                }
                if (tr.empty() || va.empty()) continue;
                const Dataset dtr = d.subset(tr);
                const Dataset dva = d.subset(va);
                if (!dtr.both_classes_present()) continue;
                const ForestModel model =
                    rf_fit(dtr, n_trees, mf, weighted, mix_seed({seed, mf, f}));
                const auto pred = model.predict(dva.x());
                std::vector<int> truth(dva.n_rows());
                for (std::size_t i = 0; i < truth.size(); ++i) truth[i] = dva.y()[i] >= 0.5;
                score_sum += weighted ? balanced_accuracy(pred, truth) : accuracy(pred, truth);
                ++scored;
            }
            const double score = scored > 0 ? score_sum / static_cast<double>(scored) : 0.0;
            if (score > best_score) {
                best_score = score;
                best_mf = mf;
            }
        }
    }
    return rf_fit(d, n_trees, best_mf, weighted, mix_seed({seed, 0xf17a1}));
}

}  // namespace prelim
