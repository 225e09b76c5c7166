#include <benchmark/benchmark.h>

#include "stq/estimator.hpp"
#include "stq/generators.hpp"

using namespace stq;

namespace {

MetricInstance hub_family(int n, std::uint64_t seed) {
    StarInstanceSpec spec;
    spec.n = n;
    spec.k = n / 4;
    spec.eps = 1.0 / 16.0;
    spec.mode = StarMode::MultiHub;
    spec.seed = seed;
    return gen_star_instance(spec);
}

void BM_estimate_known_metric(benchmark::State& state) {
    MetricInstance inst = hub_family(static_cast<int>(state.range(0)), 21);
    std::uint64_t queries = 0;
    for (auto _ : state) {
        CountingOracle oracle(inst);
        EvidenceReport report = estimate_cost(oracle, EstimatorConfig::demo(3));
        benchmark::DoNotOptimize(report.estimate);
        queries = report.queries;
    }
    state.counters["queries"] = static_cast<double>(queries);
}
BENCHMARK(BM_estimate_known_metric)->Arg(256)->Arg(512)->Arg(1024);

void BM_estimate_metric_free(benchmark::State& state) {
    MetricInstance inst = hub_family(static_cast<int>(state.range(0)), 23);
    EstimatorConfig config = EstimatorConfig::demo(5);
    config.know_terminal_metric = false;
    std::uint64_t queries = 0;
    for (auto _ : state) {
        CountingOracle oracle(inst);
        EvidenceReport report = estimate_cost(oracle, config);
        benchmark::DoNotOptimize(report.estimate);
        queries = report.queries;
    }
    state.counters["queries"] = static_cast<double>(queries);
}
BENCHMARK(BM_estimate_metric_free)->Arg(256)->Arg(512);

}  // namespace
