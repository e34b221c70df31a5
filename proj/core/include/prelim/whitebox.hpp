#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "prelim/cart.hpp"
#include "prelim/dataset.hpp"
#include "prelim/decision_list.hpp"
#include "prelim/subgroup.hpp"

namespace prelim {

enum class WhiteBoxKind { dt, dtcomp, dtcv, irep, ripper, prim, bi };

std::string whitebox_name(WhiteBoxKind kind);
WhiteBoxKind parse_whitebox(const std::string& name);

// Trees train on 10^5 - N generated points, everything else on 10^4 - N.
bool is_tree_kind(WhiteBoxKind kind);
// PRIM and BI consume probability targets; the rest need hard labels.
bool is_subgroup_kind(WhiteBoxKind kind);

inline constexpr std::array<std::size_t, 7> kDtcvLeafGrid{2, 4, 8, 16, 32, 64, 128};

struct WhiteBoxConfig {
    WhiteBoxKind kind = WhiteBoxKind::dtcomp;
    bool weighted = false;
    std::uint64_t seed = 0;
    // Caps inherited from the paired baseline inside the pipeline.
    std::optional<std::size_t> dtcv_leaf_cap;
    std::optional<std::size_t> bi_budget_cap;
};

struct WhiteBoxFit {
    std::unique_ptr<RuleModel> model;
    std::size_t dtcv_max_leaves = 0;  // grid value chosen by CV (dtcv only)
    std::size_t bi_budget = 0;        // budget chosen by CV (bi only)
    double prim_alpha = 0.0;          // peel fraction chosen by CV (prim only)
};

// DT: internal nodes must hold more than 10 rows. DTcomp: at most 8 leaves.
// DTcv: leaf cap picked from {2,4,8,...,128} by stratified 5-fold CV; with a
// baseline leaf count given, candidates never exceed it.
DecisionTree dt_variant_fit(const Dataset& d, WhiteBoxKind variant,
                            std::optional<std::size_t> baseline_leaf_count = std::nullopt,
                            bool weighted = false, std::uint64_t seed = 0);

// Dispatch over all seven variants. Targets must be hard labels except for
// prim/bi, which also accept probability scores; the minority-weight flag
// applies to trees and rule lists only (subgroup quality is WRAcc-based).
WhiteBoxFit fit_whitebox(const Matrix& x, std::span<const double> targets,
                         const WhiteBoxConfig& cfg);
WhiteBoxFit fit_whitebox(const Dataset& d, const WhiteBoxConfig& cfg);

}  // namespace prelim
