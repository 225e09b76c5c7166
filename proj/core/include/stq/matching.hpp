#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace stq {

/// Vertex-neighborhood access to a graph on vertices 0..Z-1. Every call to
/// neighbors() is counted as one probe.
class NeighborOracle {
public:
    using NeighborFn = std::function<std::vector<int>(int)>;

    NeighborOracle(int vertex_count, NeighborFn neighbors)
        : vertex_count_(vertex_count), neighbors_(std::move(neighbors)) {}

    static NeighborOracle from_edges(int vertex_count, const std::vector<std::pair<int, int>>& edges);

    std::vector<int> neighbors(int v) const {
        ++probe_count_;
        return neighbors_(v);
    }
    int vertex_count() const { return vertex_count_; }
    std::uint64_t probe_count() const { return probe_count_; }

private:
    int vertex_count_;
    NeighborFn neighbors_;
    mutable std::uint64_t probe_count_ = 0;
};

/// Total order on edges derived by hashing (seed, min id, max id); ties are
/// broken lexicographically (they do not occur in practice). The exact greedy
/// reference and the local simulation share this function.
std::uint64_t edge_rank(std::uint64_t seed, int u, int v);

/// Scans edges in increasing rank order, keeping every edge whose endpoints
/// are both unmatched. Duplicate edges are rejected.
std::vector<std::pair<int, int>> greedy_maximal_matching(
    const std::vector<std::pair<int, int>>& edges, std::uint64_t rank_seed);

struct MatchingEstimate {
    double size = 0.0;            // clamped to [0, Z/2]
    std::uint64_t probes = 0;     // neighbor-oracle calls
    int samples = 0;
    bool exhaustive = false;      // every vertex evaluated: estimate is exact
};

/// Estimates the size of the rank-greedy maximal matching induced by
/// `seed`-derived edge ranks to within an additive eps*Z (with constant
/// failure probability over seeds). Samples O(log Z / eps^2) vertices, capped
/// at `sample_cap`, and resolves each by the local simulation that recurses
/// only on lower-ranked incident edges. If the sample budget covers all of
/// 0..Z-1 the estimate degenerates to the exact greedy size.
MatchingEstimate estimate_maximal_matching(const NeighborOracle& oracle, int Z, double eps,
                                           std::uint64_t seed, int sample_cap = 1 << 20);

/// Combines maximal matchings of subgraphs H1, H2 into a maximal matching of
/// their union whose size lies in [(|m1|+|m2|)/2, |m1|+|m2|]: starts from the
/// larger matching, adds non-conflicting edges of the other, then greedily
/// completes over the other side's edge list.
std::vector<std::pair<int, int>> merge_maximal_matchings(
    const std::vector<std::pair<int, int>>& m1, const std::vector<std::pair<int, int>>& m2,
    const std::vector<std::pair<int, int>>& h1_edges,
    const std::vector<std::pair<int, int>>& h2_edges);

}  // namespace stq
