#include "prelim/prelim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "prelim/csv.hpp"
#include "prelim/cv.hpp"
#include "prelim/errors.hpp"
#include "prelim/metrics.hpp"
#include "prelim/rng.hpp"
#include "prelim/subgroup.hpp"

namespace prelim {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::shared_ptr<const Classifier> fit_blackbox(const Dataset& d, const PrelimConfig& cfg,
                                               Provenance& prov, std::uint64_t seed) {
    if (cfg.bb == BlackBoxKind::rf) {
        auto forest = std::make_shared<ForestModel>(
            rf_fit_cv(d, cfg.rf_trees, cfg.weight_minority, seed));
        prov.rf_max_features = forest->max_features();
        return forest;
    }
    BtSearchSpace space;
    space.draws = cfg.bt_draws;
    auto boosted =
        std::make_shared<BoostedModel>(bt_fit(d, space, cfg.weight_minority, seed));
    prov.bt_used = true;
    prov.bt_params = boosted->params();
    return boosted;
}

std::unique_ptr<Generator> fit_gen(const Dataset& d, const PrelimConfig& cfg,
                                   const PrelimContext& ctx, const Classifier& bb,
                                   const ForestModel* forest, std::uint64_t seed) {
    const GeneratorSpec& spec = cfg.gen;
    switch (spec.kind) {
        case GeneratorKind::dummy:
        case GeneratorKind::unif:
        case GeneratorKind::norm:
            return fit_simple(d, spec.kind, seed);
        case GeneratorKind::kdem:
        case GeneratorKind::kde:
        case GeneratorKind::kdeb:
            return fit_kde_family(d, spec.kind, seed);
        case GeneratorKind::gmm:
            return fit_gmm_generator(d, false, seed, spec.gmm);
        case GeneratorKind::gmmal:
            return fit_gmm_generator(d, true, seed, spec.gmm);
        case GeneratorKind::cmm:
            if (forest == nullptr) throw UnknownSpec("cmm: no forest available");
            return fit_cmm(d, *forest, seed);
        case GeneratorKind::rerx:
            return fit_rerx(d, bb, seed);
        case GeneratorKind::vva:
            return std::make_unique<VvaGenerator>(d, bb, seed, spec.vva_nv_ratio);
        case GeneratorKind::smote:
        case GeneratorKind::adasyn:
            return fit_smote_family(d, spec.kind, seed, spec.smote_k);
        case GeneratorKind::munge:
            return fit_munge(d, spec.munge_p, spec.munge_s, seed);
        case GeneratorKind::ssl:
            if (ctx.ssl_pool == nullptr) throw UnknownSpec("ssl: no pool provided");
            return fit_ssl(ctx.ssl_pool->points, d.n_rows(), ctx.ssl_pool->dataset_size, seed);
        case GeneratorKind::none:
            throw UnknownSpec("run_prelim: generator 'no' marks the baseline arm");
    }
    throw UnknownSpec("run_prelim: unhandled generator kind");
}

std::vector<double> label_points(const Classifier& bb, const Matrix& points, LabelMode mode) {
    if (points.rows() == 0) return {};
    if (mode == LabelMode::probability) return bb.score(points);
    const auto pred = bb.predict(points);
    std::vector<double> out(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) out[i] = static_cast<double>(pred[i]);
    return out;
}

// Union targets for the white box: true labels plus generated labels in hard
// mode; black-box scores everywhere in probability mode.
std::pair<Matrix, std::vector<double>> build_union(const Dataset& d_tr, const Matrix& d_new_x,
                                                   const std::vector<double>& d_new_y,
                                                   const Classifier& bb, LabelMode mode) {
    Matrix x = d_tr.x();
    std::vector<double> t;
    if (mode == LabelMode::probability) {
        t = bb.score(d_tr.x());
    } else {
        t = d_tr.y();
    }
    for (std::size_t r = 0; r < d_new_x.rows(); ++r) x.append_row(d_new_x.row(r));
    t.insert(t.end(), d_new_y.begin(), d_new_y.end());
    return {std::move(x), std::move(t)};
}

double score_candidate_model(const RuleModel& model, const Dataset& validation,
                             WhiteBoxKind kind) {
    if (is_subgroup_kind(kind)) {
        const Box* box = dynamic_cast<const Box*>(&model);
        return box != nullptr ? box_wracc(*box, validation.x(), validation.y()) : 0.0;
    }
    const auto pred = model.predict(validation.x());
    std::vector<int> truth(validation.n_rows());
    for (std::size_t i = 0; i < truth.size(); ++i) truth[i] = validation.y()[i] >= 0.5;
    return accuracy(pred, truth);
}

// L/N selection for vva: stratified 5-fold CV on the train split, scoring the
// downstream white box on held-out rows (accuracy, or WRAcc for subgroups).
double choose_vva_ratio(const Dataset& d_tr, const PrelimConfig& cfg, const Classifier& bb,
                        std::uint64_t gen_seed, std::uint64_t cv_seed) {
    const auto folds = stratified_folds(d_tr.x(), d_tr.y(), 5, mix_seed({cv_seed, 0x77c5}));
    const std::size_t n_folds = 1 + *std::max_element(folds.begin(), folds.end());

    double best_score = -std::numeric_limits<double>::infinity();
    double best_ratio = kVvaRatioGrid[0];
    for (const double ratio : kVvaRatioGrid) {
        const std::size_t l = static_cast<std::size_t>(
            std::llround(ratio * static_cast<double>(d_tr.n_rows())));
        VvaGenerator gen(d_tr, bb, gen_seed, cfg.gen.vva_nv_ratio);
        const Matrix sample = l > 0 ? gen.sample(l) : Matrix(0, d_tr.n_cols());
        const std::vector<double> labels = label_points(bb, sample, cfg.label_mode);

        double sum = 0.0;
        std::size_t scored = 0;
        for (std::size_t f = 0; f < n_folds; ++f) {
            std::vector<std::size_t> tr, va;
            for (std::size_t i = 0; i < folds.size(); ++i) (folds[i] == f ? va : tr).push_back(i);
            if (tr.empty() || va.empty()) continue;
            const Dataset part = d_tr.subset(tr);
            if (!part.both_classes_present()) continue;
            const Dataset val = d_tr.subset(va);

            auto [ux, ut] = build_union(part, sample, labels, bb, cfg.label_mode);
            WhiteBoxConfig wcfg;
            wcfg.kind = cfg.wb;
            wcfg.weighted = cfg.weight_minority && !is_subgroup_kind(cfg.wb);
            wcfg.seed = mix_seed({cv_seed, f});
            wcfg.dtcv_leaf_cap = cfg.dtcv_leaf_cap;
            wcfg.bi_budget_cap = cfg.bi_budget_cap;
            const WhiteBoxFit fit = fit_whitebox(ux, ut, wcfg);
            sum += score_candidate_model(*fit.model, val, cfg.wb);
            ++scored;
        }
        const double score = scored ? sum / static_cast<double>(scored)
                                    : -std::numeric_limits<double>::infinity();
        if (score > best_score) {
            best_score = score;
            best_ratio = ratio;
        }
    }
    return best_ratio;
}

}  // namespace

std::string blackbox_name(BlackBoxKind kind) {
    return kind == BlackBoxKind::rf ? "rf" : "bt";
}

BlackBoxKind parse_blackbox(const std::string& name) {
    if (name == "rf") return BlackBoxKind::rf;
    if (name == "bt") return BlackBoxKind::bt;
    throw UnknownSpec("unknown black-box kind: " + name);
}

std::optional<std::size_t> choose_l(WhiteBoxKind wb, std::size_t n_train,
                                    std::size_t dataset_size, GeneratorKind gen) {
    switch (gen) {
        case GeneratorKind::dummy:
            return n_train;
        case GeneratorKind::rerx:
        case GeneratorKind::vva:
            return std::nullopt;  // sized while running
        case GeneratorKind::ssl: {
            const std::size_t cap = n_train < kOtherSampleBudget
                                        ? kOtherSampleBudget - n_train
                                        : 0;
            const std::size_t half =
                dataset_size > n_train ? (dataset_size - n_train) / 2 : 0;
            return std::min(cap, half);
        }
        default: {
            const std::size_t budget =
                is_tree_kind(wb) ? kTreeSampleBudget : kOtherSampleBudget;
            return budget > n_train ? budget - n_train : 0;
        }
    }
}

PrelimResult run_prelim(const Dataset& d_tr, const PrelimConfig& cfg, const PrelimContext& ctx) {
    if (!d_tr.both_classes_present()) {
        throw DegenerateTraining("run_prelim: train split has a single class");
    }
    if (cfg.label_mode == LabelMode::probability && !is_subgroup_kind(cfg.wb)) {
        throw InvalidHyperparameter("run_prelim: probability labels pair with prim/bi only");
    }

    PrelimResult result;
    Provenance& prov = result.provenance;
    prov.seed = cfg.seed;
    prov.bb_kind = blackbox_name(cfg.bb);
    prov.wb_kind = whitebox_name(cfg.wb);
    prov.gen_kind = generator_name(cfg.gen.kind);
    prov.label_mode = cfg.label_mode == LabelMode::hard ? "hard" : "probability";
    prov.weighted = cfg.weight_minority;
    result.feature_names = d_tr.feature_names();

    // Black box (line 2); a shared one keeps hyperparameter search per split.
    auto t0 = Clock::now();
    std::shared_ptr<const Classifier> bb = ctx.shared_bb;
    if (!bb) bb = fit_blackbox(d_tr, cfg, prov, mix_seed({cfg.seed, 0xbb}));
    result.bb = bb;

    // Region source for cmm: the bb itself when it is a forest.
    std::shared_ptr<const ForestModel> forest = ctx.shared_forest;
    if (cfg.gen.kind == GeneratorKind::cmm && !forest) {
        forest = std::dynamic_pointer_cast<const ForestModel>(bb);
        if (!forest) {
            forest = std::make_shared<ForestModel>(
                rf_fit_cv(d_tr, cfg.rf_trees, cfg.weight_minority, mix_seed({cfg.seed, 0xcf})));
        }
    }
    prov.fit_bb_ms = ms_since(t0);

    // Generator (line 3).
    t0 = Clock::now();
    const std::uint64_t gen_seed = mix_seed({cfg.seed, 0x9e4});
    auto gen = fit_gen(d_tr, cfg, ctx, *bb, forest.get(), gen_seed);
    prov.fallback = gen->fallback_note();

    // Sample size: explicit override, the generator's own size, the vva
    // ratio search, or the documented budget.
    std::size_t l = 0;
    if (cfg.explicit_l) {
        l = *cfg.explicit_l;
    } else if (const auto fixed = gen->fixed_size()) {
        l = *fixed;
    } else if (cfg.gen.kind == GeneratorKind::vva) {
        const double ratio =
            choose_vva_ratio(d_tr, cfg, *bb, gen_seed, mix_seed({cfg.seed, 0x77c}));
        prov.vva_ratio = ratio;
        l = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(d_tr.n_rows())));
        gen = fit_gen(d_tr, cfg, ctx, *bb, forest.get(), gen_seed);  // fresh stream
    } else {
        const std::size_t pool_size =
            ctx.ssl_pool != nullptr ? ctx.ssl_pool->dataset_size : d_tr.n_rows();
        l = choose_l(cfg.wb, d_tr.n_rows(), pool_size, cfg.gen.kind).value_or(0);
    }
    prov.l = l;
    if (cfg.gen.kind == GeneratorKind::ssl) {
        const auto consumed = gen->consumed_indices();
        prov.ssl_consumed.reserve(consumed.size());
        for (const std::size_t i : consumed) {
            prov.ssl_consumed.push_back(ctx.ssl_pool->original_indices.empty()
                                            ? i
                                            : ctx.ssl_pool->original_indices[i]);
        }
    }

    // Lines 4-9: draw and label.
    result.d_new_x = l > 0 ? gen->sample(l) : Matrix(0, d_tr.n_cols());
    prov.fit_gen_ms = ms_since(t0);

    t0 = Clock::now();
    result.d_new_y = label_points(*bb, result.d_new_x, cfg.label_mode);
    prov.label_ms = ms_since(t0);

    // Line 10: white box on the union.
    t0 = Clock::now();
    auto [ux, ut] = build_union(d_tr, result.d_new_x, result.d_new_y, *bb, cfg.label_mode);
    WhiteBoxConfig wcfg;
    wcfg.kind = cfg.wb;
    wcfg.weighted = cfg.weight_minority && !is_subgroup_kind(cfg.wb);
    wcfg.seed = mix_seed({cfg.seed, 0x3b});
    wcfg.dtcv_leaf_cap = cfg.dtcv_leaf_cap;
    wcfg.bi_budget_cap = cfg.bi_budget_cap;
    WhiteBoxFit fit = fit_whitebox(ux, ut, wcfg);
    prov.dtcv_max_leaves = fit.dtcv_max_leaves;
    prov.bi_budget = fit.bi_budget;
    prov.prim_alpha = fit.prim_alpha;
    prov.fit_wb_ms = ms_since(t0);

    result.wb = std::move(fit.model);
    return result;
}

WhiteBoxFit run_baseline(const Dataset& d_tr, WhiteBoxKind wb, bool weighted,
                         std::uint64_t seed) {
    if (!d_tr.both_classes_present()) {
        throw DegenerateTraining("run_baseline: train split has a single class");
    }
    WhiteBoxConfig cfg;
    cfg.kind = wb;
    cfg.weighted = weighted && !is_subgroup_kind(wb);
    cfg.seed = mix_seed({seed, 0x3b});
    return fit_whitebox(d_tr.x(), d_tr.y(), cfg);
}

void save_result(const PrelimResult& result, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);

    std::ofstream model(dir / "model.txt");
    if (!model) throw IoError("cannot write " + (dir / "model.txt").string());
    model << result.wb->describe(result.feature_names);

    write_dataset_csv(dir / "dnew.csv", result.d_new_x, result.d_new_y, result.feature_names);

    nlohmann::json j;
    const Provenance& p = result.provenance;
    j["seed"] = p.seed;
    j["bb"] = p.bb_kind;
    j["wb"] = p.wb_kind;
    j["generator"] = p.gen_kind;
    j["label_mode"] = p.label_mode;
    j["weight_minority"] = p.weighted;
    j["l"] = p.l;
    j["fallback"] = p.fallback;
    if (p.vva_ratio >= 0.0) j["vva_ratio"] = p.vva_ratio;
    if (p.rf_max_features > 0) j["rf_max_features"] = p.rf_max_features;
    if (p.bt_used) {
        j["bt"] = {{"n_estimators", p.bt_params.n_estimators},
                   {"learning_rate", p.bt_params.learning_rate},
                   {"gamma", p.bt_params.gamma},
                   {"subsample", p.bt_params.subsample}};
    }
    if (p.dtcv_max_leaves > 0) j["dtcv_max_leaves"] = p.dtcv_max_leaves;
    if (p.bi_budget > 0) j["bi_budget"] = p.bi_budget;
    if (p.prim_alpha > 0.0) j["prim_alpha"] = p.prim_alpha;
    if (!p.ssl_consumed.empty()) j["ssl_consumed"] = p.ssl_consumed;
    j["timings_ms"] = {{"fit_bb", p.fit_bb_ms},
                       {"fit_gen", p.fit_gen_ms},
                       {"label", p.label_ms},
                       {"fit_wb", p.fit_wb_ms}};

    std::ofstream prov(dir / "provenance.json");
    if (!prov) throw IoError("cannot write " + (dir / "provenance.json").string());
    prov << j.dump(2) << "\n";
}

}  // namespace prelim
