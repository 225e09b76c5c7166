#include <benchmark/benchmark.h>

#include "stq/baselines.hpp"
#include "stq/generators.hpp"

using namespace stq;

namespace {

void BM_subset_enum(benchmark::State& state) {
    const int steiner = static_cast<int>(state.range(0));
    MetricInstance inst =
        gen_random_metric(RandomMetricKind::Uniform12, 10 + steiner, 10, 42);
    for (auto _ : state) {
        benchmark::DoNotOptimize(exact_steiner(inst, ExactMethod::SubsetEnum).cost);
    }
}
BENCHMARK(BM_subset_enum)->Arg(6)->Arg(10)->Arg(14);

void BM_dreyfus_wagner(benchmark::State& state) {
    const int k = static_cast<int>(state.range(0));
    MetricInstance inst = gen_random_metric(RandomMetricKind::Uniform12, 16, k, 42);
    for (auto _ : state) {
        benchmark::DoNotOptimize(exact_steiner(inst, ExactMethod::DreyfusWagner).cost);
    }
}
BENCHMARK(BM_dreyfus_wagner)->Arg(6)->Arg(10)->Arg(13);

void BM_terminal_mst(benchmark::State& state) {
    const int k = static_cast<int>(state.range(0));
    MetricInstance inst = gen_random_metric(RandomMetricKind::EuclideanPlane, 2 * k, k, 7);
    for (auto _ : state) {
        CountingOracle oracle(inst);
        benchmark::DoNotOptimize(terminal_mst(oracle).cost);
    }
}
BENCHMARK(BM_terminal_mst)->Arg(64)->Arg(256)->Arg(1024);

void BM_good_tree(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    MetricInstance inst = gen_random_metric(RandomMetricKind::Uniform12, n, n / 3, 7);
    for (auto _ : state) {
        CountingOracle oracle(inst);
        benchmark::DoNotOptimize(good_tree_approx(oracle).cost);
    }
}
BENCHMARK(BM_good_tree)->Arg(30)->Arg(60);

}  // namespace
