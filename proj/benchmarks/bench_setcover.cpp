#include <benchmark/benchmark.h>

#include <random>

#include "stq/hashing.hpp"
#include "stq/matching.hpp"
#include "stq/setcover.hpp"

using namespace stq;

namespace {

SetSystem random_system(int universe, int sets, double density, std::uint64_t seed) {
    std::mt19937_64 rng(splitmix64(seed));
    std::bernoulli_distribution coin(density);
    SetSystem sys;
    sys.universe = universe;
    for (int s = 0; s < sets; ++s) {
        std::vector<int> members;
        for (int e = 0; e < universe; ++e)
            if (coin(rng)) members.push_back(e);
        sys.sets.push_back(std::move(members));
    }
    return sys.with_singletons();
}

void BM_alg_set_cover(benchmark::State& state) {
    const int universe = static_cast<int>(state.range(0));
    SetSystem sys = random_system(universe, 2 * universe, 0.15, 99);
    std::uint64_t probes = 0;
    for (auto _ : state) {
        SetCoverView view = sys.view();
        benchmark::DoNotOptimize(alg_set_cover(view, 0.2, true, 3).x);
        probes = view.probes();
    }
    state.counters["probes"] = static_cast<double>(probes);
}
BENCHMARK(BM_alg_set_cover)->Arg(20)->Arg(60)->Arg(180);

void BM_exact_set_cover(benchmark::State& state) {
    SetSystem sys = random_system(static_cast<int>(state.range(0)), 40, 0.25, 7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(exact_set_cover(sys));
    }
}
BENCHMARK(BM_exact_set_cover)->Arg(12)->Arg(16)->Arg(20);

void BM_matching_estimate(benchmark::State& state) {
    const int z = static_cast<int>(state.range(0));
    std::mt19937_64 rng(5);
    std::bernoulli_distribution coin(8.0 / z);
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < z; ++u)
        for (int v = u + 1; v < z; ++v)
            if (coin(rng)) edges.push_back({u, v});
    for (auto _ : state) {
        NeighborOracle oracle = NeighborOracle::from_edges(z, edges);
        benchmark::DoNotOptimize(estimate_maximal_matching(oracle, z, 0.15, 11).size);
    }
}
BENCHMARK(BM_matching_estimate)->Arg(100)->Arg(400)->Arg(1600);

}  // namespace
