#include "prelim/whitebox.hpp"

#include <algorithm>
#include <cmath>

#include "prelim/cv.hpp"
#include "prelim/errors.hpp"
#include "prelim/metrics.hpp"
#include "prelim/rng.hpp"

namespace prelim {

namespace {

constexpr std::size_t kRuleCap = 8;
constexpr std::size_t kDtcompLeaves = 8;
constexpr std::size_t kDtMinInternal = 10;

void require_binary(std::span<const double> targets, const char* who) {
    for (double t : targets) {
        if (t != 0.0 && t != 1.0) {
            throw BadFormat(std::string(who) + ": hard 0/1 labels required");
        }
    }
}

CartConfig cart_config_for(const Dataset& d, bool weighted, std::size_t max_leaves,
                           std::size_t min_internal) {
    CartConfig cfg;
    cfg.max_leaves = max_leaves;
    cfg.min_internal_samples = min_internal;
    if (weighted) {
        const auto [w0, w1] = minority_weights(d.y());
        cfg.weight0 = w0;
        cfg.weight1 = w1;
    }
    return cfg;
}

std::size_t choose_dtcv_leaves(const Dataset& d, bool weighted, std::uint64_t seed,
                               std::optional<std::size_t> cap) {
    std::vector<std::size_t> grid;
    for (std::size_t g : kDtcvLeafGrid) {
        if (!cap || g <= *cap) grid.push_back(g);
    }
    if (grid.empty()) grid.push_back(std::max<std::size_t>(1, *cap));
    if (grid.size() == 1) return grid.front();

    const auto folds = stratified_folds(d.x(), d.y(), 5, mix_seed({seed, 0xd7c5}));
    const std::size_t n_folds = 1 + *std::max_element(folds.begin(), folds.end());

    double best_score = -1.0;
    std::size_t best = grid.front();
    for (const std::size_t leaves : grid) {
        double sum = 0.0;
        std::size_t scored = 0;
        for (std::size_t f = 0; f < n_folds; ++f) {
            std::vector<std::size_t> tr, va;
            for (std::size_t i = 0; i < folds.size(); ++i) (folds[i] == f ? va : tr).push_back(i);
            if (tr.empty() || va.empty()) continue;
            const Dataset dtr = d.subset(tr);
            const Dataset dva = d.subset(va);
            const DecisionTree tree =
                cart_fit(dtr, cart_config_for(dtr, weighted, leaves, 0));
            const auto pred = tree.predict(dva.x());
            std::vector<int> truth(dva.n_rows());
            for (std::size_t i = 0; i < truth.size(); ++i) truth[i] = dva.y()[i] >= 0.5;
            sum += weighted ? balanced_accuracy(pred, truth) : accuracy(pred, truth);
            ++scored;
        }
        const double score = scored ? sum / static_cast<double>(scored) : 0.0;
        if (score > best_score) {
            best_score = score;
            best = leaves;
        }
    }
    return best;
}

}  // namespace

std::string whitebox_name(WhiteBoxKind kind) {
    switch (kind) {
        case WhiteBoxKind::dt: return "dt";
        case WhiteBoxKind::dtcomp: return "dtcomp";
        case WhiteBoxKind::dtcv: return "dtcv";
        case WhiteBoxKind::irep: return "irep";
        case WhiteBoxKind::ripper: return "ripper";
        case WhiteBoxKind::prim: return "prim";
        case WhiteBoxKind::bi: return "bi";
    }
    return "dt";
}

WhiteBoxKind parse_whitebox(const std::string& name) {
    for (const WhiteBoxKind k :
         {WhiteBoxKind::dt, WhiteBoxKind::dtcomp, WhiteBoxKind::dtcv, WhiteBoxKind::irep,
          WhiteBoxKind::ripper, WhiteBoxKind::prim, WhiteBoxKind::bi}) {
        if (whitebox_name(k) == name) return k;
    }
    throw UnknownSpec("unknown white-box variant: " + name);
}

bool is_tree_kind(WhiteBoxKind kind) {
    return kind == WhiteBoxKind::dt || kind == WhiteBoxKind::dtcomp || kind == WhiteBoxKind::dtcv;
}

bool is_subgroup_kind(WhiteBoxKind kind) {
    return kind == WhiteBoxKind::prim || kind == WhiteBoxKind::bi;
}

DecisionTree dt_variant_fit(const Dataset& d, WhiteBoxKind variant,
                            std::optional<std::size_t> baseline_leaf_count, bool weighted,
                            std::uint64_t seed) {
    require_binary(d.y(), "dt_variant_fit");
    switch (variant) {
        case WhiteBoxKind::dt:
            return cart_fit(d, cart_config_for(d, weighted, 0, kDtMinInternal));
        case WhiteBoxKind::dtcomp:
            return cart_fit(d, cart_config_for(d, weighted, kDtcompLeaves, 0));
        case WhiteBoxKind::dtcv: {
            const std::size_t leaves =
                choose_dtcv_leaves(d, weighted, seed, baseline_leaf_count);
            return cart_fit(d, cart_config_for(d, weighted, leaves, 0));
        }
        default:
            throw UnknownSpec("dt_variant_fit: not a decision-tree variant");
    }
}

WhiteBoxFit fit_whitebox(const Matrix& x, std::span<const double> targets,
                         const WhiteBoxConfig& cfg) {
    WhiteBoxFit fit;
    switch (cfg.kind) {
        case WhiteBoxKind::dt:
        case WhiteBoxKind::dtcomp:
        case WhiteBoxKind::dtcv: {
            require_binary(targets, "fit_whitebox");
            Dataset d(x, {targets.begin(), targets.end()}, {});
            if (cfg.kind == WhiteBoxKind::dtcv) {
                fit.dtcv_max_leaves =
                    choose_dtcv_leaves(d, cfg.weighted, cfg.seed, cfg.dtcv_leaf_cap);
                fit.model = std::make_unique<DecisionTree>(
                    cart_fit(d, cart_config_for(d, cfg.weighted, fit.dtcv_max_leaves, 0)));
            } else {
                fit.model = std::make_unique<DecisionTree>(
                    dt_variant_fit(d, cfg.kind, std::nullopt, cfg.weighted, cfg.seed));
            }
            break;
        }
        case WhiteBoxKind::irep:
        case WhiteBoxKind::ripper: {
            require_binary(targets, "fit_whitebox");
            Dataset d(x, {targets.begin(), targets.end()}, {});
            RuleLearnConfig rcfg;
            rcfg.max_rules = kRuleCap;
            rcfg.weighted = cfg.weighted;
            rcfg.seed = cfg.seed;
            fit.model = std::make_unique<DecisionList>(
                cfg.kind == WhiteBoxKind::irep ? irep_fit(d, rcfg) : ripper_fit(d, rcfg));
            break;
        }
        case WhiteBoxKind::prim: {
            PrimFit pf = prim_fit_cv(x, targets, cfg.seed);
            fit.prim_alpha = pf.alpha;
            fit.model = std::make_unique<Box>(std::move(pf.box));
            break;
        }
        case WhiteBoxKind::bi: {
            BiFit bf = bestinterval_fit_cv(x, targets, cfg.seed,
                                           cfg.bi_budget_cap.value_or(0));
            fit.bi_budget = bf.budget;
            fit.model = std::make_unique<Box>(std::move(bf.box));
            break;
        }
    }
    return fit;
}

WhiteBoxFit fit_whitebox(const Dataset& d, const WhiteBoxConfig& cfg) {
    return fit_whitebox(d.x(), d.y(), cfg);
}

}  // namespace prelim
