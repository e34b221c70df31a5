#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "prelim/metrics.hpp"
#include "prelim/prelim.hpp"
#include "prelim/synthetic.hpp"

namespace prelim {

struct SyntheticSpec {
    std::string spec = "two-gaussians";
    std::size_t size = 1200;
    double noise = 0.0;
    std::uint64_t seed = 1;
};

struct DatasetEntry {
    std::string name;
    std::string path;                        // CSV on disk, or
    std::optional<SyntheticSpec> synthetic;  // generated in memory
};

// Full experiment grid. Every (dataset, n_train) pair must satisfy
// n_train < |D|.
struct ExperimentMatrix {
    std::vector<DatasetEntry> datasets;
    std::vector<std::size_t> n_train{100, 400};
    std::size_t k = 25;
    std::vector<BlackBoxKind> bbs{BlackBoxKind::rf, BlackBoxKind::bt};
    std::vector<WhiteBoxKind> wbs{WhiteBoxKind::dtcomp, WhiteBoxKind::dtcv,
                                  WhiteBoxKind::irep,   WhiteBoxKind::ripper,
                                  WhiteBoxKind::bi,     WhiteBoxKind::prim};
    std::vector<GeneratorKind> gens{GeneratorKind::kde};
    std::vector<std::string> metrics{"rel_acc_inc", "rel_ba_inc", "rel_fid_inc", "wracc",
                                     "complexity"};
    bool weight_minority = false;
    std::uint64_t seed = 42;
    std::size_t jobs = 1;
    std::size_t rf_trees = 100;
    std::size_t bt_draws = 25;
};

ExperimentMatrix load_matrix_json(const std::string& text);
ExperimentMatrix load_matrix_file(const std::filesystem::path& path);

// One experiment: a (dataset, n_train, split, bb, wb, gen) cell evaluated on
// the held-out rows. Baseline rows carry gen = "no".
struct ExperimentRow {
    std::string dataset;
    std::size_t n_train = 0;
    std::size_t split = 0;
    std::uint64_t seed = 0;
    std::string bb, wb, gen, label_mode;
    bool weighted = false;
    std::size_t l = 0;
    std::string fallback;
    QualityReport q;
    // The paired baseline model evaluated on this row's evaluation set.
    QualityReport paired_baseline;
    double bb_accuracy = 0.0;
    double bb_rel_acc_inc = 0.0;
    double naive_accuracy = 0.0;
    std::size_t eval_rows = 0;
    // Private-sharing mode: accuracy of the standard union-trained tree and
    // the gap (union minus shared).
    double union_accuracy = 0.0;
    double gap = 0.0;
    bool sharing = false;
};

// Aggregate over datasets x splits for one (metric, n_train, bb, wb, gen).
struct AggregateCell {
    std::string metric;
    std::size_t n_train = 0;
    std::string bb, wb, gen;
    double mean = 0.0;
    std::size_t wins = 0, draws = 0, losses = 0;
    std::size_t count = 0;
};

struct MatrixResult {
    std::vector<ExperimentRow> rows;
    std::vector<AggregateCell> cells;
    ExperimentMatrix matrix;
    bool sharing = false;
};

// Runs the grid: per split, scale on the train part, fit the baseline and
// every (bb, gen) arm on the identical split, evaluate on held-out rows.
// Failed experiments are excluded (with a stderr warning), never fatal.
MatrixResult run_matrix(const ExperimentMatrix& m);

// Same grid, but the white box trains on the generated points alone
// (decision-tree variants only); rows carry the union-vs-shared gap.
MatrixResult private_sharing_run(const ExperimentMatrix& m);

// Writes experiments.csv, heatmap_<metric>_<N>.csv, wdl_<metric>[__<gen>].csv
// and, in sharing mode, gap_summary.csv.
void emit_reports(const MatrixResult& result, const std::filesystem::path& out_dir);

// Metric accessor used by the aggregation and the report writers.
double metric_value(const QualityReport& q, const std::string& metric);

inline constexpr double kDrawTolerance = 1e-9;

}  // namespace prelim
