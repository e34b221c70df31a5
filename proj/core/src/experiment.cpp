#include "prelim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "prelim/csv.hpp"
#include "prelim/errors.hpp"
#include "prelim/rng.hpp"
#include "prelim/scaler.hpp"
#include "prelim/split.hpp"
#include "prelim/subgroup.hpp"

namespace prelim {

namespace {

constexpr std::uint64_t kSplitTag = 0x5b117;
constexpr std::uint64_t kExpTag = 0xe4be7;
constexpr std::uint64_t kBbTag = 0xbb;
constexpr std::uint64_t kWbTag = 0x3b;
constexpr std::uint64_t kGenTag = 0x9e4;

Dataset load_entry(const DatasetEntry& entry) {
    if (entry.synthetic) {
        const SyntheticSpec& s = *entry.synthetic;
        return make_synthetic(s.spec, s.size, s.noise, s.seed);
    }
    return read_dataset_csv(entry.path);
}

// The variant's headline metric: accuracy for trees and rule lists, WRAcc for
// subgroups; drives the per-row outcome column.
double primary_metric(const QualityReport& q, WhiteBoxKind wb) {
    return is_subgroup_kind(wb) ? q.wracc : q.accuracy;
}

Outcome compare_metric(double candidate, double reference) {
    const double delta = candidate - reference;
    if (std::abs(delta) <= kDrawTolerance) return Outcome::draw;
    return delta > 0.0 ? Outcome::win : Outcome::loss;
}

QualityReport evaluate_model(const RuleModel& model, const Matrix& eval_x,
                             const std::vector<double>& eval_y,
                             const std::vector<int>& bb_pred, int naive_class) {
    QualityReport q;
    const auto pred = model.predict(eval_x);
    std::vector<int> truth(eval_y.size());
    for (std::size_t i = 0; i < truth.size(); ++i) truth[i] = eval_y[i] >= 0.5 ? 1 : 0;

    q.accuracy = accuracy(pred, truth);
    q.balanced_accuracy = balanced_accuracy(pred, truth);
    q.fidelity = fidelity(pred, bb_pred);

    double covered = 0.0, covered_pos = 0.0, total_pos = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        total_pos += eval_y[i];
        if (pred[i] == 1) {
            covered += 1.0;
            covered_pos += eval_y[i];
        }
    }
    covered_pos = std::clamp(covered_pos, 0.0, covered);
    total_pos = std::clamp(total_pos, 0.0, static_cast<double>(pred.size()));
    q.wracc = wracc(covered, covered_pos, static_cast<double>(pred.size()), total_pos);

    const std::vector<int> naive_pred(pred.size(), naive_class);
    const double naive_acc = accuracy(naive_pred, truth);
    const double naive_ba = balanced_accuracy(naive_pred, truth);
    const double naive_fid = fidelity(naive_pred, bb_pred);
    q.rel_acc_inc = relative_increase(q.accuracy, naive_acc);
    q.rel_ba_inc = relative_increase(q.balanced_accuracy, naive_ba);
    q.rel_fid_inc = relative_increase(q.fidelity, naive_fid);

    q.complexity = model.complexity();
    return q;
}

struct SplitUnit {
    std::size_t dataset_idx, n_idx, split_idx;
};

struct UnitResult {
    std::vector<ExperimentRow> rows;
};

// Everything shared by one (dataset, n_train, split) unit.
void run_unit(const ExperimentMatrix& m, const Dataset& full, const std::string& ds_name,
              const SplitPlan& plan, std::size_t dataset_idx, std::size_t n_idx,
              std::size_t split_idx, bool sharing, UnitResult& out) {
    const std::size_t n = m.n_train[n_idx];
    const std::uint64_t exp_seed =
        mix_seed({m.seed, kExpTag, dataset_idx, n, split_idx});

    const auto& [train_idx, test_idx] = plan.splits[split_idx];
    const Dataset d_tr_raw = full.subset(train_idx);
    if (!d_tr_raw.both_classes_present()) {
        std::cerr << "[prelim] skipping single-class split " << split_idx << " of " << ds_name
                  << " (n_train=" << n << ")\n";
        return;
    }
    const Scaler scaler = fit_scaler(d_tr_raw);
    const Dataset d_tr = apply_scaler(scaler, d_tr_raw);
    const Dataset d_te = apply_scaler(scaler, full.subset(test_idx));
    const int naive = majority_class(d_tr.y());

    // Baselines are bb-independent; fidelity pairs them with each bb below.
    struct Baseline {
        WhiteBoxFit fit;
        bool ok = false;
    };
    std::vector<Baseline> baselines(m.wbs.size());
    for (std::size_t w = 0; w < m.wbs.size(); ++w) {
        try {
            baselines[w].fit = run_baseline(d_tr, m.wbs[w], m.weight_minority,
                                            mix_seed({exp_seed, kWbTag, w}));
            baselines[w].ok = true;
        } catch (const std::exception& e) {
            std::cerr << "[prelim] baseline " << whitebox_name(m.wbs[w]) << " failed on "
                      << ds_name << " split " << split_idx << ": " << e.what() << "\n";
        }
    }

    for (std::size_t b = 0; b < m.bbs.size(); ++b) {
        const BlackBoxKind bb_kind = m.bbs[b];
        PrelimConfig base_cfg;
        base_cfg.bb = bb_kind;
        base_cfg.weight_minority = m.weight_minority;
        base_cfg.rf_trees = m.rf_trees;
        base_cfg.bt_draws = m.bt_draws;

        // One hyperparameter search per (split, bb kind), reused by every
        // generator arm.
        std::shared_ptr<const Classifier> bb;
        Provenance bb_prov;
        try {
            PrelimConfig probe = base_cfg;
            probe.seed = mix_seed({exp_seed, kBbTag, b});
            if (bb_kind == BlackBoxKind::rf) {
                bb = std::make_shared<ForestModel>(
                    rf_fit_cv(d_tr, m.rf_trees, m.weight_minority, probe.seed));
            } else {
                BtSearchSpace space;
                space.draws = m.bt_draws;
                bb = std::make_shared<BoostedModel>(
                    bt_fit(d_tr, space, m.weight_minority, probe.seed));
            }
        } catch (const std::exception& e) {
            std::cerr << "[prelim] black box " << blackbox_name(bb_kind) << " failed on "
                      << ds_name << " split " << split_idx << ": " << e.what() << "\n";
            continue;
        }

        // Region source for cmm arms under a bt black box.
        std::shared_ptr<const ForestModel> cmm_forest =
            std::dynamic_pointer_cast<const ForestModel>(bb);
        if (!cmm_forest &&
            std::find(m.gens.begin(), m.gens.end(), GeneratorKind::cmm) != m.gens.end()) {
            cmm_forest = std::make_shared<ForestModel>(rf_fit_cv(
                d_tr, m.rf_trees, m.weight_minority, mix_seed({exp_seed, kBbTag, b, 0xcf})));
        }

        const auto bb_pred_full = bb->predict(d_te.x());
        std::vector<int> truth_full(d_te.n_rows());
        for (std::size_t i = 0; i < truth_full.size(); ++i) {
            truth_full[i] = d_te.y()[i] >= 0.5 ? 1 : 0;
        }
        const double bb_acc_full = accuracy(bb_pred_full, truth_full);
        const std::vector<int> naive_pred_full(d_te.n_rows(), naive);
        const double naive_acc_full = accuracy(naive_pred_full, truth_full);

        for (std::size_t w = 0; w < m.wbs.size(); ++w) {
            if (!baselines[w].ok) continue;
            const WhiteBoxKind wb_kind = m.wbs[w];
            const RuleModel& baseline_model = *baselines[w].fit.model;

            const QualityReport baseline_q =
                evaluate_model(baseline_model, d_te.x(), d_te.y(), bb_pred_full, naive);

            ExperimentRow base_row;
            base_row.dataset = ds_name;
            base_row.n_train = n;
            base_row.split = split_idx;
            base_row.seed = exp_seed;
            base_row.bb = blackbox_name(bb_kind);
            base_row.wb = whitebox_name(wb_kind);
            base_row.gen = "no";
            base_row.label_mode = "hard";
            base_row.weighted = m.weight_minority;
            base_row.q = baseline_q;
            base_row.paired_baseline = baseline_q;
            base_row.q.outcome = Outcome::draw;
            base_row.bb_accuracy = bb_acc_full;
            base_row.bb_rel_acc_inc = bb_acc_full - naive_acc_full;
            base_row.naive_accuracy = naive_acc_full;
            base_row.eval_rows = d_te.n_rows();
            base_row.sharing = sharing;
            out.rows.push_back(base_row);

            for (std::size_t g = 0; g < m.gens.size(); ++g) {
                const GeneratorKind gen_kind = m.gens[g];
                if (gen_kind == GeneratorKind::none) continue;
                try {
                    PrelimConfig cfg = base_cfg;
                    cfg.wb = wb_kind;
                    cfg.gen.kind = gen_kind;
                    cfg.seed = mix_seed({exp_seed, kGenTag, b, w, g});
                    cfg.label_mode = is_subgroup_kind(wb_kind) ? LabelMode::probability
                                                               : LabelMode::hard;
                    if (wb_kind == WhiteBoxKind::dtcv) {
                        cfg.dtcv_leaf_cap = baseline_model.complexity();
                    }
                    if (wb_kind == WhiteBoxKind::bi) {
                        cfg.bi_budget_cap = baselines[w].fit.bi_budget;
                    }

                    SslPool pool;
                    PrelimContext ctx;
                    ctx.shared_bb = bb;
                    ctx.shared_forest = cmm_forest;
                    if (gen_kind == GeneratorKind::ssl) {
                        pool.points = d_te.x();
                        pool.original_indices.resize(d_te.n_rows());
                        for (std::size_t i = 0; i < d_te.n_rows(); ++i) {
                            pool.original_indices[i] = i;
                        }
                        pool.dataset_size = full.n_rows();
                        ctx.ssl_pool = &pool;
                    }

                    PrelimResult res = run_prelim(d_tr, cfg, ctx);

                    // Evaluation set: the test rows minus anything the ssl
                    // generator consumed.
                    Matrix eval_x = d_te.x();
                    std::vector<double> eval_y = d_te.y();
                    std::vector<int> bb_pred_eval = bb_pred_full;
                    if (!res.provenance.ssl_consumed.empty()) {
                        const std::set<std::size_t> consumed(
                            res.provenance.ssl_consumed.begin(),
                            res.provenance.ssl_consumed.end());
                        std::vector<std::size_t> keep;
                        for (std::size_t i = 0; i < d_te.n_rows(); ++i) {
                            if (!consumed.count(i)) keep.push_back(i);
                        }
                        eval_x = d_te.x().take_rows(keep);
                        std::vector<double> y2(keep.size());
                        std::vector<int> p2(keep.size());
                        for (std::size_t i = 0; i < keep.size(); ++i) {
                            y2[i] = eval_y[keep[i]];
                            p2[i] = bb_pred_eval[keep[i]];
                        }
                        eval_y = std::move(y2);
                        bb_pred_eval = std::move(p2);
                    }

                    ExperimentRow row;
                    row.dataset = ds_name;
                    row.n_train = n;
                    row.split = split_idx;
                    row.seed = exp_seed;
                    row.bb = blackbox_name(bb_kind);
                    row.wb = whitebox_name(wb_kind);
                    row.gen = generator_name(gen_kind);
                    row.label_mode = res.provenance.label_mode;
                    row.weighted = m.weight_minority;
                    row.l = res.provenance.l;
                    row.fallback = res.provenance.fallback;
                    row.eval_rows = eval_y.size();
                    row.sharing = sharing;

                    std::vector<int> truth_eval(eval_y.size());
                    for (std::size_t i = 0; i < eval_y.size(); ++i) {
                        truth_eval[i] = eval_y[i] >= 0.5 ? 1 : 0;
                    }
                    const std::vector<int> naive_eval(eval_y.size(), naive);
                    row.naive_accuracy = accuracy(naive_eval, truth_eval);
                    row.bb_accuracy = accuracy(bb_pred_eval, truth_eval);
                    row.bb_rel_acc_inc = row.bb_accuracy - row.naive_accuracy;

                    row.paired_baseline =
                        evaluate_model(baseline_model, eval_x, eval_y, bb_pred_eval, naive);

                    if (sharing) {
                        // Shared arm: the tree learned from the generated
                        // points alone; union arm kept for the gap column.
                        if (res.d_new_x.rows() == 0) {
                            throw DegenerateTraining("sharing: empty generated sample");
                        }
                        WhiteBoxConfig scfg;
                        scfg.kind = wb_kind;
                        scfg.weighted = m.weight_minority;
                        scfg.seed = mix_seed({cfg.seed, 0x54a2e});
                        scfg.dtcv_leaf_cap = cfg.dtcv_leaf_cap;
                        const WhiteBoxFit shared =
                            fit_whitebox(res.d_new_x, res.d_new_y, scfg);
                        row.q = evaluate_model(*shared.model, eval_x, eval_y, bb_pred_eval,
                                               naive);
                        const QualityReport union_q =
                            evaluate_model(*res.wb, eval_x, eval_y, bb_pred_eval, naive);
                        row.union_accuracy = union_q.accuracy;
                        row.gap = union_q.accuracy - row.q.accuracy;
                    } else {
                        row.q = evaluate_model(*res.wb, eval_x, eval_y, bb_pred_eval, naive);
                    }
                    row.q.outcome = compare_metric(primary_metric(row.q, wb_kind),
                                                   primary_metric(row.paired_baseline, wb_kind));
                    out.rows.push_back(std::move(row));
                } catch (const std::exception& e) {
                    std::cerr << "[prelim] experiment failed (" << ds_name << ", n=" << n
                              << ", split=" << split_idx << ", " << blackbox_name(bb_kind)
                              << ", " << whitebox_name(wb_kind) << ", "
                              << generator_name(gen_kind) << "): " << e.what() << "\n";
                }
            }
        }
    }
}

MatrixResult run_grid(const ExperimentMatrix& m, bool sharing) {
    if (m.datasets.empty()) throw UnknownSpec("run_matrix: no datasets configured");
    if (m.k == 0) throw TooSmall("run_matrix: k must be >= 1");
    if (sharing) {
        for (const WhiteBoxKind wb : m.wbs) {
            if (!is_tree_kind(wb)) {
                throw UnknownSpec("private sharing runs decision-tree variants only");
            }
        }
    }

    std::vector<Dataset> datasets;
    datasets.reserve(m.datasets.size());
    for (const auto& entry : m.datasets) datasets.push_back(load_entry(entry));
    for (const Dataset& d : datasets) {
        for (const std::size_t n : m.n_train) {
            if (n >= d.n_rows()) {
                throw TooSmall("run_matrix: n_train " + std::to_string(n) +
                               " >= dataset size " + std::to_string(d.n_rows()));
            }
        }
    }

    // Split plans per (dataset, n_train); all arms of a pair share them.
    std::map<std::pair<std::size_t, std::size_t>, SplitPlan> plans;
    for (std::size_t d = 0; d < datasets.size(); ++d) {
        for (std::size_t ni = 0; ni < m.n_train.size(); ++ni) {
            plans[{d, ni}] = make_splits(datasets[d].n_rows(), m.n_train[ni], m.k,
                                         mix_seed({m.seed, kSplitTag, d, m.n_train[ni]}));
        }
    }

    std::vector<SplitUnit> units;
    for (std::size_t d = 0; d < datasets.size(); ++d) {
        for (std::size_t ni = 0; ni < m.n_train.size(); ++ni) {
            for (std::size_t s = 0; s < m.k; ++s) units.push_back({d, ni, s});
        }
    }

    std::vector<UnitResult> results(units.size());
    std::atomic<std::size_t> next{0};
    const std::size_t jobs = std::max<std::size_t>(1, m.jobs);
    const auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= units.size()) break;
            const SplitUnit& u = units[i];
            run_unit(m, datasets[u.dataset_idx], m.datasets[u.dataset_idx].name,
                     plans.at({u.dataset_idx, u.n_idx}), u.dataset_idx, u.n_idx, u.split_idx,
                     sharing, results[i]);
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    MatrixResult out;
    out.matrix = m;
    out.sharing = sharing;
    for (UnitResult& r : results) {
        for (ExperimentRow& row : r.rows) out.rows.push_back(std::move(row));
    }

    // Aggregation: pooled means plus win/draw/loss counts vs the paired
    // baseline, per metric.
    std::vector<std::string> gen_names{"no"};
    for (const GeneratorKind g : m.gens) {
        if (g != GeneratorKind::none) gen_names.push_back(generator_name(g));
    }
    for (const std::string& metric : m.metrics) {
        for (const std::size_t n : m.n_train) {
            for (const BlackBoxKind bb : m.bbs) {
                for (const WhiteBoxKind wb : m.wbs) {
                    for (const std::string& gen : gen_names) {
                        AggregateCell cell;
                        cell.metric = metric;
                        cell.n_train = n;
                        cell.bb = blackbox_name(bb);
                        cell.wb = whitebox_name(wb);
                        cell.gen = gen;
                        double sum = 0.0;
                        for (const ExperimentRow& row : out.rows) {
                            if (row.n_train != n || row.bb != cell.bb || row.wb != cell.wb ||
                                row.gen != gen) {
                                continue;
                            }
                            const double v = metric_value(row.q, metric);
                            const double ref = metric_value(row.paired_baseline, metric);
                            sum += v;
                            ++cell.count;
                            switch (compare_metric(v, ref)) {
                                case Outcome::win: ++cell.wins; break;
                                case Outcome::draw: ++cell.draws; break;
                                case Outcome::loss: ++cell.losses; break;
                            }
                        }
                        if (cell.count > 0) cell.mean = sum / static_cast<double>(cell.count);
                        out.cells.push_back(std::move(cell));
                    }
                }
            }
        }
    }
    return out;
}

std::string csv_escape(const std::string& s) {
    return s;  // names are alphanumeric by construction
}

}  // namespace

double metric_value(const QualityReport& q, const std::string& metric) {
    if (metric == "accuracy") return q.accuracy;
    if (metric == "balanced_accuracy") return q.balanced_accuracy;
    if (metric == "fidelity") return q.fidelity;
    if (metric == "wracc") return q.wracc;
    if (metric == "complexity") return static_cast<double>(q.complexity);
    if (metric == "rel_acc_inc") return q.rel_acc_inc;
    if (metric == "rel_ba_inc") return q.rel_ba_inc;
    if (metric == "rel_fid_inc") return q.rel_fid_inc;
    throw UnknownSpec("unknown metric: " + metric);
}

ExperimentMatrix load_matrix_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw BadFormat(std::string("matrix config: ") + e.what());
    }

    ExperimentMatrix m;
    if (!j.contains("datasets") || !j["datasets"].is_array() || j["datasets"].empty()) {
        throw BadFormat("matrix config: 'datasets' array required");
    }
    for (const auto& entry : j["datasets"]) {
        DatasetEntry d;
        d.name = entry.value("name", "");
        if (entry.contains("synthetic")) {
            const auto& s = entry["synthetic"];
            SyntheticSpec spec;
            spec.spec = s.value("spec", spec.spec);
            spec.size = s.value("size", spec.size);
            spec.noise = s.value("noise", spec.noise);
            spec.seed = s.value("seed", spec.seed);
            d.synthetic = spec;
            if (d.name.empty()) d.name = spec.spec;
        } else if (entry.contains("path")) {
            d.path = entry["path"].get<std::string>();
            if (d.name.empty()) {
                d.name = std::filesystem::path(d.path).stem().string();
            }
        } else {
            throw BadFormat("matrix config: dataset needs 'path' or 'synthetic'");
        }
        m.datasets.push_back(std::move(d));
    }

    if (j.contains("n_train")) m.n_train = j["n_train"].get<std::vector<std::size_t>>();
    m.k = j.value("k", m.k);
    if (j.contains("bb")) {
        m.bbs.clear();
        for (const auto& name : j["bb"]) m.bbs.push_back(parse_blackbox(name.get<std::string>()));
    }
    if (j.contains("wb")) {
        m.wbs.clear();
        for (const auto& name : j["wb"]) m.wbs.push_back(parse_whitebox(name.get<std::string>()));
    }
    if (j.contains("generators")) {
        m.gens.clear();
        for (const auto& name : j["generators"]) {
            const GeneratorKind g = parse_generator(name.get<std::string>());
            if (g != GeneratorKind::none) m.gens.push_back(g);
        }
    }
    if (j.contains("metrics")) m.metrics = j["metrics"].get<std::vector<std::string>>();
    for (const std::string& metric : m.metrics) {
        metric_value(QualityReport{}, metric);  // validates the name
    }
    m.weight_minority = j.value("weight_minority", m.weight_minority);
    m.seed = j.value("seed", m.seed);
    m.jobs = j.value("jobs", m.jobs);
    m.rf_trees = j.value("rf_trees", m.rf_trees);
    m.bt_draws = j.value("bt_draws", m.bt_draws);
    return m;
}

ExperimentMatrix load_matrix_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return load_matrix_json(buf.str());
}

MatrixResult run_matrix(const ExperimentMatrix& m) {
    return run_grid(m, false);
}

MatrixResult private_sharing_run(const ExperimentMatrix& m) {
    return run_grid(m, true);
}

void emit_reports(const MatrixResult& result, const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const ExperimentMatrix& m = result.matrix;

    // experiments.csv: one row per experiment with full provenance.
    {
        std::ofstream out(out_dir / "experiments.csv");
        if (!out) throw IoError("cannot write experiments.csv");
        out << "dataset,n_train,split,seed,bb,wb,gen,label_mode,weighted,l,fallback,"
               "complexity,accuracy,balanced_accuracy,fidelity,wracc,rel_acc_inc,rel_ba_inc,"
               "rel_fid_inc,bb_accuracy,bb_rel_acc_inc,naive_accuracy,eval_rows,outcome";
        if (result.sharing) out << ",union_accuracy,gap";
        out << "\n";
        for (const ExperimentRow& r : result.rows) {
            out << csv_escape(r.dataset) << ',' << r.n_train << ',' << r.split << ',' << r.seed
                << ',' << r.bb << ',' << r.wb << ',' << r.gen << ',' << r.label_mode << ','
                << (r.weighted ? 1 : 0) << ',' << r.l << ',' << csv_escape(r.fallback) << ','
                << r.q.complexity << ',' << format_real(r.q.accuracy) << ','
                << format_real(r.q.balanced_accuracy) << ',' << format_real(r.q.fidelity) << ','
                << format_real(r.q.wracc) << ',' << format_real(r.q.rel_acc_inc) << ','
                << format_real(r.q.rel_ba_inc) << ',' << format_real(r.q.rel_fid_inc) << ','
                << format_real(r.bb_accuracy) << ',' << format_real(r.bb_rel_acc_inc) << ','
                << format_real(r.naive_accuracy) << ',' << r.eval_rows << ','
                << outcome_name(r.q.outcome);
            if (result.sharing) {
                out << ',' << format_real(r.union_accuracy) << ',' << format_real(r.gap);
            }
            out << "\n";
        }
    }

    const auto find_cell = [&](const std::string& metric, std::size_t n, const std::string& bb,
                               const std::string& wb,
                               const std::string& gen) -> const AggregateCell* {
        for (const AggregateCell& c : result.cells) {
            if (c.metric == metric && c.n_train == n && c.bb == bb && c.wb == wb &&
                c.gen == gen) {
                return &c;
            }
        }
        return nullptr;
    };

    std::vector<std::string> gen_names{"no"};
    for (const GeneratorKind g : m.gens) {
        if (g != GeneratorKind::none) gen_names.push_back(generator_name(g));
    }

    // heatmap_<metric>_<N>.csv: generators x (wb x bb) means.
    for (const std::string& metric : m.metrics) {
        for (const std::size_t n : m.n_train) {
            std::ofstream out(out_dir /
                              ("heatmap_" + metric + "_" + std::to_string(n) + ".csv"));
            if (!out) throw IoError("cannot write heatmap csv");
            out << "generator";
            for (const WhiteBoxKind wb : m.wbs) {
                for (const BlackBoxKind bb : m.bbs) {
                    out << ',' << whitebox_name(wb) << '_' << blackbox_name(bb);
                }
            }
            out << "\n";
            for (const std::string& gen : gen_names) {
                out << gen;
                for (const WhiteBoxKind wb : m.wbs) {
                    for (const BlackBoxKind bb : m.bbs) {
                        const AggregateCell* cell = find_cell(metric, n, blackbox_name(bb),
                                                              whitebox_name(wb), gen);
                        out << ',';
                        if (cell != nullptr && cell->count > 0) out << format_real(cell->mean);
                    }
                }
                out << "\n";
            }
        }
    }

    // wdl_<metric>.csv in the headline shape (kde when present, else the
    // first generator), plus one file per remaining generator.
    const auto write_wdl = [&](const std::string& metric, const std::string& gen,
                               const fs::path& path) {
        std::ofstream out(path);
        if (!out) throw IoError("cannot write " + path.string());
        out << "bb,n_train,bb_inc";
        for (const WhiteBoxKind wb : m.wbs) out << ',' << whitebox_name(wb);
        out << "\n";
        for (const BlackBoxKind bb : m.bbs) {
            for (const std::size_t n : m.n_train) {
                // Mean black-box relative accuracy increase over the rows of
                // this (bb, n, gen) slice.
                double bb_sum = 0.0;
                std::size_t bb_count = 0;
                for (const ExperimentRow& r : result.rows) {
                    if (r.bb == blackbox_name(bb) && r.n_train == n && r.gen == gen) {
                        bb_sum += r.bb_rel_acc_inc;
                        ++bb_count;
                    }
                }
                out << blackbox_name(bb) << ',' << n << ','
                    << format_real(bb_count ? bb_sum / static_cast<double>(bb_count) : 0.0);
                for (const WhiteBoxKind wb : m.wbs) {
                    const AggregateCell* cell =
                        find_cell(metric, n, blackbox_name(bb), whitebox_name(wb), gen);
                    out << ',';
                    if (cell != nullptr) {
                        out << cell->wins << '/' << cell->draws << '/' << cell->losses;
                    }
                }
                out << "\n";
            }
        }
    };

    std::string headline = gen_names.size() > 1 ? gen_names[1] : "no";
    for (const std::string& gen : gen_names) {
        if (gen == "kde") headline = gen;
    }
    for (const std::string& metric : m.metrics) {
        if (metric == "complexity") continue;  // w/d/l over complexity is not meaningful
        write_wdl(metric, headline, out_dir / ("wdl_" + metric + ".csv"));
        for (const std::string& gen : gen_names) {
            if (gen == "no" || gen == headline) continue;
            write_wdl(metric, gen, out_dir / ("wdl_" + metric + "__" + gen + ".csv"));
        }
    }

    // Sharing mode: union-vs-shared accuracy gaps per cell.
    if (result.sharing) {
        std::ofstream out(out_dir / "gap_summary.csv");
        if (!out) throw IoError("cannot write gap_summary.csv");
        out << "bb,n_train,wb,gen,mean_gap,mean_abs_gap,count\n";
        for (const BlackBoxKind bb : m.bbs) {
            for (const std::size_t n : m.n_train) {
                for (const WhiteBoxKind wb : m.wbs) {
                    for (const std::string& gen : gen_names) {
                        if (gen == "no") continue;
                        double sum = 0.0, abs_sum = 0.0;
                        std::size_t count = 0;
                        for (const ExperimentRow& r : result.rows) {
                            if (r.bb != blackbox_name(bb) || r.n_train != n ||
                                r.wb != whitebox_name(wb) || r.gen != gen) {
                                continue;
                            }
                            sum += r.gap;
                            abs_sum += std::abs(r.gap);
                            ++count;
                        }
                        if (count == 0) continue;
                        out << blackbox_name(bb) << ',' << n << ',' << whitebox_name(wb) << ','
                            << gen << ',' << format_real(sum / static_cast<double>(count))
                            << ',' << format_real(abs_sum / static_cast<double>(count)) << ','
                            << count << "\n";
                    }
                }
            }
        }
    }
}

}  // namespace prelim
