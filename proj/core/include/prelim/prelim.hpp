#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "prelim/boosted.hpp"
#include "prelim/classifier.hpp"
#include "prelim/dataset.hpp"
#include "prelim/forest.hpp"
#include "prelim/generators.hpp"
#include "prelim/whitebox.hpp"

namespace prelim {

enum class BlackBoxKind { rf, bt };

std::string blackbox_name(BlackBoxKind kind);
BlackBoxKind parse_blackbox(const std::string& name);

enum class LabelMode { hard, probability };

// Generated-sample budgets: 10^5 - N for tree learners, 10^4 - N otherwise.
inline constexpr std::size_t kTreeSampleBudget = 100000;
inline constexpr std::size_t kOtherSampleBudget = 10000;

// Candidate L/N ratios searched when the vva generator sizes its own sample.
inline constexpr double kVvaRatioGrid[] = {0.0, 0.5, 1.0, 1.5, 2.0, 2.5};

struct GeneratorSpec {
    GeneratorKind kind = GeneratorKind::kde;
    std::size_t smote_k = 5;
    double munge_p = 0.5;
    double munge_s = 5.0;
    double vva_nv_ratio = 0.2;
    GmmOptions gmm;
};

struct PrelimConfig {
    BlackBoxKind bb = BlackBoxKind::rf;
    WhiteBoxKind wb = WhiteBoxKind::dtcomp;
    GeneratorSpec gen;
    std::optional<std::size_t> explicit_l;  // overrides the L policy when set
    LabelMode label_mode = LabelMode::hard;
    bool weight_minority = false;
    std::uint64_t seed = 0;
    std::size_t rf_trees = 100;
    std::size_t bt_draws = 25;
    // Caps inherited from the paired baseline.
    std::optional<std::size_t> dtcv_leaf_cap;
    std::optional<std::size_t> bi_budget_cap;
};

// Unlabeled pool for the ssl generator (scaled test features).
struct SslPool {
    Matrix points;
    std::vector<std::size_t> original_indices;  // positions in the evaluation set
    std::size_t dataset_size = 0;               // |D| for the budget formula
};

struct PrelimContext {
    std::shared_ptr<const Classifier> shared_bb;      // reuse across generators on a split
    std::shared_ptr<const ForestModel> shared_forest;  // region source for cmm under a bt bb
    const SslPool* ssl_pool = nullptr;
};

struct Provenance {
    std::uint64_t seed = 0;
    std::string bb_kind, wb_kind, gen_kind, label_mode;
    bool weighted = false;
    std::size_t l = 0;
    std::string fallback;  // generator fallback note, empty when none
    double vva_ratio = -1.0;
    std::size_t rf_max_features = 0;
    bool bt_used = false;
    BtParams bt_params;
    std::size_t dtcv_max_leaves = 0;
    std::size_t bi_budget = 0;
    double prim_alpha = 0.0;
    std::vector<std::size_t> ssl_consumed;  // positions removed from the evaluation set
    double fit_bb_ms = 0.0, fit_gen_ms = 0.0, label_ms = 0.0, fit_wb_ms = 0.0;
};

struct PrelimResult {
    std::unique_ptr<RuleModel> wb;
    std::shared_ptr<const Classifier> bb;
    Matrix d_new_x;
    std::vector<double> d_new_y;  // bb labels (hard) or scores (probability)
    std::vector<std::string> feature_names;
    Provenance provenance;
};

// Sample-size policy. Returns nullopt for the kinds that size themselves
// during the run (rerx from its subset, vva from its ratio search).
std::optional<std::size_t> choose_l(WhiteBoxKind wb, std::size_t n_train,
                                    std::size_t dataset_size, GeneratorKind gen);

// Pipeline: fit the black box and the generator on the train data, draw L
// points, label them with the black box, then fit the white box on the union
// with its caps. Probability mode (prim/bi only) replaces every target in
// the union with the black-box score.
PrelimResult run_prelim(const Dataset& d_tr, const PrelimConfig& cfg,
                        const PrelimContext& ctx = {});

// White box trained solely on the train data with identical caps and CV.
WhiteBoxFit run_baseline(const Dataset& d_tr, WhiteBoxKind wb, bool weighted,
                         std::uint64_t seed);

// Writes model.txt, dnew.csv and provenance.json into dir.
void save_result(const PrelimResult& result, const std::filesystem::path& dir);

}  // namespace prelim
