#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "prelim/csv.hpp"
#include "prelim/errors.hpp"
#include "prelim/experiment.hpp"
#include "prelim/prelim.hpp"
#include "prelim/scaler.hpp"
#include "prelim/split.hpp"
#include "prelim/synthetic.hpp"

namespace {

using namespace prelim;

int cmd_run(const std::string& config, const std::string& out, std::size_t jobs,
            std::optional<std::uint64_t> seed, bool sharing) {
    ExperimentMatrix m = load_matrix_file(config);
    if (jobs > 0) m.jobs = jobs;
    if (seed) m.seed = *seed;
    const MatrixResult result = sharing ? private_sharing_run(m) : run_matrix(m);
    emit_reports(result, out);
    std::size_t failures = 0;
    for (const AggregateCell& c : result.cells) {
        if (c.metric == m.metrics.front() && c.gen != "no") failures += c.count == 0;
    }
    std::cerr << "[prelim] wrote " << result.rows.size() << " experiment rows to " << out
              << "\n";
    if (failures > 0) {
        std::cerr << "[prelim] warning: " << failures << " cells ended up empty\n";
    }
    return 0;
}

int cmd_synth(const std::string& spec, std::size_t size, double noise, std::uint64_t seed,
              const std::string& out) {
    const Dataset d = make_synthetic(spec, size, noise, seed);
    write_dataset_csv(out, d.x(), d.y(), d.feature_names());
    std::cerr << "[prelim] wrote " << d.n_rows() << "x" << d.n_cols() << " dataset to " << out
              << "\n";
    return 0;
}

int cmd_fit(const std::string& data, std::size_t n_train, const std::string& bb,
            const std::string& wb, const std::string& gen, const std::string& label_mode,
            bool weighted, std::uint64_t seed, const std::string& out) {
    const Dataset full = read_dataset_csv(data);
    if (n_train == 0 || n_train >= full.n_rows()) {
        throw TooSmall("fit: need 0 < n-train < dataset rows");
    }

    const SplitPlan single = make_splits(full, n_train, 1, mix_seed({seed, 0x5b117}));
    const Dataset train_raw = full.subset(single.splits[0].first);
    const Scaler scaler = fit_scaler(train_raw);
    const Dataset train = apply_scaler(scaler, train_raw);
    const Dataset test = apply_scaler(scaler, full.subset(single.splits[0].second));

    PrelimConfig cfg;
    cfg.bb = parse_blackbox(bb);
    cfg.wb = parse_whitebox(wb);
    cfg.gen.kind = parse_generator(gen);
    cfg.weight_minority = weighted;
    cfg.seed = mix_seed({seed, 0xf17});
    if (label_mode == "probability") {
        cfg.label_mode = LabelMode::probability;
    } else if (label_mode != "hard") {
        throw UnknownSpec("fit: label mode must be hard or probability");
    }

    SslPool pool;
    PrelimContext ctx;
    if (cfg.gen.kind == GeneratorKind::ssl) {
        pool.points = test.x();
        pool.dataset_size = full.n_rows();
        ctx.ssl_pool = &pool;
    }

    const PrelimResult result = run_prelim(train, cfg, ctx);
    save_result(result, out);

    const auto pred = result.wb->predict(test.x());
    std::vector<int> truth(test.n_rows());
    for (std::size_t i = 0; i < truth.size(); ++i) truth[i] = test.y()[i] >= 0.5 ? 1 : 0;
    std::cerr << "[prelim] wrote " << out << " (test accuracy "
              << format_real(accuracy(pred, truth)) << ", complexity "
              << result.wb->complexity() << ")\n";
    return 0;
}

int cmd_prep(const std::string& in, const std::string& target, const std::string& out) {
    const RawTable raw = read_raw_csv(in);
    const Dataset d = preprocess(raw, target);
    write_dataset_csv(out, d.x(), d.y(), d.feature_names());
    std::cerr << "[prelim] kept " << d.n_rows() << " rows and " << d.n_cols()
              << " features; wrote " << out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PRELIM: rule extraction and tabular data augmentation toolkit"};
    app.require_subcommand(1);

    std::string config, out, spec = "two-gaussians", data, target, label_mode = "hard";
    std::string bb = "rf", wb = "dtcomp", gen = "kde";
    std::size_t size = 1200, n_train = 100, jobs = 0;
    double noise = 0.0;
    std::uint64_t seed = 42;
    bool weighted = false;
    std::optional<std::uint64_t> seed_override;

    auto* run = app.add_subcommand("run", "Run a benchmark experiment matrix");
    run->add_option("--config", config, "Matrix config JSON")->required();
    run->add_option("--out", out, "Output directory for reports")->required();
    run->add_option("--jobs", jobs, "Worker threads (default from config)");
    run->add_option("--seed", seed_override, "Override the config seed");

    auto* share = app.add_subcommand("share", "Private-sharing mode: train trees on D^new alone");
    share->add_option("--config", config, "Matrix config JSON")->required();
    share->add_option("--out", out, "Output directory for reports")->required();
    share->add_option("--jobs", jobs, "Worker threads (default from config)");
    share->add_option("--seed", seed_override, "Override the config seed");

    auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset CSV");
    synth->add_option("--spec", spec, "two-gaussians | rings | checkerboard")->required();
    synth->add_option("--size", size, "Row count (>= 200)")->required();
    synth->add_option("--noise", noise, "Label flip probability [0, 0.5)");
    synth->add_option("--seed", seed, "Generator seed");
    synth->add_option("--out", out, "Output CSV path")->required();

    auto* fit = app.add_subcommand("fit", "Run one pipeline fit and save the bundle");
    fit->add_option("--data", data, "Dataset CSV (features + final y column)")->required();
    fit->add_option("--n-train", n_train, "Train rows (rest become the test split)")->required();
    fit->add_option("--bb", bb, "rf | bt");
    fit->add_option("--wb", wb, "dt | dtcomp | dtcv | irep | ripper | prim | bi");
    fit->add_option("--gen", gen, "Generator kind");
    fit->add_option("--label-mode", label_mode, "hard | probability");
    fit->add_flag("--weighted", weighted, "Weight the minority class");
    fit->add_option("--seed", seed, "Pipeline seed");
    fit->add_option("--out", out, "Output directory")->required();

    auto* prep = app.add_subcommand("prep", "Filter a raw CSV into the dataset schema");
    prep->add_option("--in", data, "Raw CSV")->required();
    prep->add_option("--target", target, "Target column name")->required();
    prep->add_option("--out", out, "Output CSV path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config, out, jobs, seed_override, false);
        if (share->parsed()) return cmd_run(config, out, jobs, seed_override, true);
        if (synth->parsed()) return cmd_synth(spec, size, noise, seed, out);
        if (fit->parsed()) {
            return cmd_fit(data, n_train, bb, wb, gen, label_mode, weighted, seed, out);
        }
        if (prep->parsed()) return cmd_prep(data, target, out);
    } catch (const std::exception& e) {
        std::cerr << "[prelim] error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
