#include <doctest.h>

#include "stq/matching.hpp"
#include "test_support.hpp"

using namespace stq;

TEST_CASE("greedy matching follows the rank order on a path") {
    // Path 0-1-2: whichever edge ranks lower wins alone.
    const std::vector<std::pair<int, int>> edges{{0, 1}, {1, 2}};
    for (std::uint64_t seed = 0; seed < 32; ++seed) {
        auto m = greedy_maximal_matching(edges, seed);
        REQUIRE(m.size() == 1);
        const bool first_lower = edge_rank(seed, 0, 1) < edge_rank(seed, 1, 2);
        CHECK(m[0] == (first_lower ? std::pair<int, int>{0, 1} : std::pair<int, int>{1, 2}));
    }
}

TEST_CASE("any rank on a triangle gives exactly one edge") {
    const std::vector<std::pair<int, int>> edges{{0, 1}, {1, 2}, {0, 2}};
    for (std::uint64_t seed = 0; seed < 16; ++seed)
        CHECK(greedy_maximal_matching(edges, seed).size() == 1);
}

TEST_CASE("duplicate and degenerate edges are rejected") {
    CHECK_THROWS_AS(greedy_maximal_matching({{0, 1}, {1, 0}}, 1), std::invalid_argument);
    CHECK_THROWS_AS(greedy_maximal_matching({{2, 2}}, 1), std::invalid_argument);
}

TEST_CASE("greedy output is maximal and within the classic factor of maximum") {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        const int n = 8 + static_cast<int>(seed % 6);
        auto edges = testsupport::gnp_edges(n, 0.3, seed * 31 + 5);
        auto m = greedy_maximal_matching(edges, seed);
        CHECK(testsupport::is_maximal_matching(edges, m, n));
        const int maximum = testsupport::maximum_matching_size(n, edges);
        CHECK(static_cast<int>(m.size()) <= maximum);
        CHECK(2 * static_cast<int>(m.size()) >= maximum);
    }
}

TEST_CASE("estimate on an empty graph is zero") {
    NeighborOracle oracle(10, [](int) { return std::vector<int>{}; });
    MatchingEstimate est = estimate_maximal_matching(oracle, 10, 0.2, 7);
    CHECK(est.size == 0.0);
}

TEST_CASE("estimate on a perfect matching graph") {
    // 10 disjoint edges (2i, 2i+1) on 20 vertices: unique maximal matching.
    NeighborOracle oracle(20, [](int v) { return std::vector<int>{v ^ 1}; });
    MatchingEstimate est = estimate_maximal_matching(oracle, 20, 0.1, 99);
    CHECK(est.size >= 8.0);
    CHECK(est.size <= 12.0);
}

TEST_CASE("estimate tracks the exact greedy size under the shared rank seed") {
    const int z = 40;
    const double eps = 0.15;
    int within = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto edges = testsupport::gnp_edges(z, 0.2, 1000 + seed);
        NeighborOracle oracle = NeighborOracle::from_edges(z, edges);
        MatchingEstimate est = estimate_maximal_matching(oracle, z, eps, seed);
        const double exact = static_cast<double>(greedy_maximal_matching(edges, seed).size());
        if (std::abs(est.size - exact) <= eps * z + 1e-9) ++within;
    }
    CHECK(within >= 90);
}

TEST_CASE("sampling mode keeps the additive guarantee on larger graphs") {
    const int z = 400;
    const double eps = 0.3;
    int within = 0;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        auto edges = testsupport::gnp_edges(z, 0.01, 77 + seed);
        NeighborOracle oracle = NeighborOracle::from_edges(z, edges);
        MatchingEstimate est = estimate_maximal_matching(oracle, z, eps, seed, /*sample_cap=*/200);
        CHECK_FALSE(est.exhaustive);  // genuinely sampled
        const double exact = static_cast<double>(greedy_maximal_matching(edges, seed).size());
        if (std::abs(est.size - exact) <= eps * z + 1e-9) ++within;
    }
    CHECK(within >= 27);
}

TEST_CASE("estimates are clamped to the feasible range") {
    NeighborOracle oracle(6, [](int v) {
        std::vector<int> out;
        for (int u = 0; u < 6; ++u)
            if (u != v) out.push_back(u);
        return out;
    });
    MatchingEstimate est = estimate_maximal_matching(oracle, 6, 0.5, 3);
    CHECK(est.size >= 0.0);
    CHECK(est.size <= 3.0);
    CHECK_THROWS_AS(estimate_maximal_matching(oracle, 6, 1.5, 3), std::invalid_argument);
}

TEST_CASE("probe count stays within the degree-scaled budget") {
    // Acceptance-style bound with a generous constant: C * (dbar+1) * log Z / eps^2.
    const double eps = 0.15;
    for (int z : {40, 80, 160}) {
        auto edges = testsupport::gnp_edges(z, 0.2, 5 * z);
        NeighborOracle oracle = NeighborOracle::from_edges(z, edges);
        estimate_maximal_matching(oracle, z, eps, 13);
        const double dbar = 2.0 * edges.size() / z;
        const double bound = (dbar + 1.0) * std::log(z) / (eps * eps);
        CHECK(static_cast<double>(oracle.probe_count()) <= 40.0 * bound);
    }
}

TEST_CASE("matching merge respects the combined bounds") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const int n = 10;
        auto h1 = testsupport::gnp_edges(n, 0.2, seed * 7 + 1);
        auto h2 = testsupport::gnp_edges(n, 0.2, seed * 7 + 2);
        auto m1 = greedy_maximal_matching(h1, seed);
        auto m2 = greedy_maximal_matching(h2, seed + 1);
        auto merged = merge_maximal_matchings(m1, m2, h1, h2);

        std::vector<std::pair<int, int>> h;
        h.insert(h.end(), h1.begin(), h1.end());
        for (auto e : h2)
            if (std::find(h.begin(), h.end(), e) == h.end()) h.push_back(e);
        CHECK(testsupport::is_maximal_matching(h, merged, n));
        CHECK(2 * merged.size() >= m1.size() + m2.size());
        CHECK(merged.size() <= m1.size() + m2.size());
    }
}
