#include <benchmark/benchmark.h>

#include "ridgeinfo/infolattice.h"
#include "ridgeinfo/parallel.h"
#include "ridgeinfo/rng.h"
#include "ridgeinfo/simulate.h"
#include "ridgeinfo/stats.h"

using namespace ridgeinfo;

namespace {

const Dataset &calibrated() {
    static Dataset d = [] {
        ExperimentSpec spec;
        return sample_dataset(spec, NoiseModel{0.1285, 0.0, {}}, 1);
    }();
    return d;
}

}  // namespace

static void BM_plugin_mi_order3(benchmark::State &state) {
    auto table = JointTable::from_dataset(calibrated());
    for (auto _ : state) {
        benchmark::DoNotOptimize(plugin_mi(table, 0b00100011));
    }
}
BENCHMARK(BM_plugin_mi_order3);

static void BM_compute_g(benchmark::State &state) {
    set_max_threads(1);
    auto table = JointTable::from_dataset(calibrated());
    for (auto _ : state) {
        benchmark::DoNotOptimize(compute_g(table, static_cast<unsigned>(state.range(0))));
    }
}
BENCHMARK(BM_compute_g)->DenseRange(1, 3);

static void BM_mobius(benchmark::State &state) {
    auto g = compute_g(calibrated(), 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(mobius_invert(g));
    }
}
BENCHMARK(BM_mobius);

static void BM_sample_dataset(benchmark::State &state) {
    ExperimentSpec spec;
    spec.shots_per_key = static_cast<uint32_t>(state.range(0));
    uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_dataset(spec, NoiseModel{0.13, 0.01, {}}, seed++));
    }
    state.SetItemsProcessed(state.iterations() * spec.shots_per_key * 8);
}
BENCHMARK(BM_sample_dataset)->Arg(1024)->Arg(16384);

static void BM_permutation_accuracy(benchmark::State &state) {
    set_max_threads(1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(permutation_test(calibrated(), PermStatistic::accuracy, 50, 3));
    }
}
BENCHMARK(BM_permutation_accuracy)->Unit(benchmark::kMillisecond);

static void BM_permutation_cps(benchmark::State &state) {
    set_max_threads(1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(permutation_test(calibrated(), PermStatistic::cps, 10, 3));
    }
}
BENCHMARK(BM_permutation_cps)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
