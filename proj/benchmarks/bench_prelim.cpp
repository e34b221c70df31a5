#include <benchmark/benchmark.h>

#include "prelim/cart.hpp"
#include "prelim/dataset.hpp"
#include "prelim/decision_list.hpp"
#include "prelim/forest.hpp"
#include "prelim/generators.hpp"
#include "prelim/metrics.hpp"
#include "prelim/rng.hpp"
#include "prelim/subgroup.hpp"
#include "prelim/synthetic.hpp"

namespace {

using namespace prelim;

Dataset bench_data(std::size_t n, std::size_t m, std::uint64_t seed) {
    Rng rng(seed);
    Matrix x(n, m);
    std::vector<double> y(n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < m; ++c) x.at(r, c) = rng.uniform();
        y[r] = (x.at(r, 0) + 0.2 * rng.normal()) > 0.5 ? 1.0 : 0.0;
    }
    y[0] = 0.0;
    y[1] = 1.0;
    return Dataset(std::move(x), std::move(y), {});
}

void BM_cart_fit(benchmark::State& state) {
    const Dataset d = bench_data(static_cast<std::size_t>(state.range(0)), 4, 1);
    CartConfig cfg;
    cfg.max_leaves = 8;
    for (auto _ : state) {
        benchmark::DoNotOptimize(cart_fit(d.x(), d.y(), cfg));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_cart_fit)->Arg(1000)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_forest_score(benchmark::State& state) {
    const Dataset d = bench_data(200, 4, 2);
    const ForestModel forest = rf_fit(d, 100, 2, false, 3);
    const Dataset probe = bench_data(static_cast<std::size_t>(state.range(0)), 4, 4);
    for (auto _ : state) {
        benchmark::DoNotOptimize(forest.score(probe.x()));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_forest_score)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_wracc(benchmark::State& state) {
    double acc = 0.0;
    for (auto _ : state) {
        acc += wracc(40, 30, 100, 50);
    }
    benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_wracc);

void BM_kde_sample(benchmark::State& state) {
    const Dataset d = bench_data(200, 4, 5);
    auto gen = fit_kde_family(d, GeneratorKind::kde, 7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(gen->sample(static_cast<std::size_t>(state.range(0))));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_kde_sample)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_smote_sample(benchmark::State& state) {
    const Dataset d = bench_data(200, 4, 9);
    auto gen = fit_smote_family(d, GeneratorKind::smote, 11);
    for (auto _ : state) {
        benchmark::DoNotOptimize(gen->sample(static_cast<std::size_t>(state.range(0))));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_smote_sample)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_munge_sample(benchmark::State& state) {
    const Dataset d = bench_data(200, 4, 13);
    auto gen = fit_munge(d, 0.5, 5.0, 15);
    for (auto _ : state) {
        benchmark::DoNotOptimize(gen->sample(static_cast<std::size_t>(state.range(0))));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_munge_sample)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_bestinterval(benchmark::State& state) {
    const Dataset d = bench_data(static_cast<std::size_t>(state.range(0)), 4, 17);
    for (auto _ : state) {
        benchmark::DoNotOptimize(bestinterval_fit(d.x(), d.y(), 4));
    }
}
BENCHMARK(BM_bestinterval)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_prim_peel(benchmark::State& state) {
    const Dataset d = bench_data(static_cast<std::size_t>(state.range(0)), 4, 19);
    for (auto _ : state) {
        benchmark::DoNotOptimize(prim_fit(d.x(), d.y(), 0.05));
    }
}
BENCHMARK(BM_prim_peel)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_irep(benchmark::State& state) {
    const Dataset d = bench_data(static_cast<std::size_t>(state.range(0)), 4, 21);
    for (auto _ : state) {
        benchmark::DoNotOptimize(irep_fit(d, {.seed = 23}));
    }
}
BENCHMARK(BM_irep)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_silverman(benchmark::State& state) {
    const Dataset d = bench_data(static_cast<std::size_t>(state.range(0)), 1, 25);
    const auto col = d.x().column(0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(silverman_bandwidth(col));
    }
}
BENCHMARK(BM_silverman)->Arg(400)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
