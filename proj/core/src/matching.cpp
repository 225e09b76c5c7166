#include "stq/matching.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <random>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "stq/hashing.hpp"

namespace stq {

NeighborOracle NeighborOracle::from_edges(int vertex_count,
                                          const std::vector<std::pair<int, int>>& edges) {
    auto adj = std::make_shared<std::vector<std::vector<int>>>(
        static_cast<std::size_t>(vertex_count));
    for (auto [u, v] : edges) {
        (*adj)[static_cast<std::size_t>(u)].push_back(v);
        (*adj)[static_cast<std::size_t>(v)].push_back(u);
    }
    return NeighborOracle(vertex_count,
                          [adj](int v) { return (*adj)[static_cast<std::size_t>(v)]; });
}

std::uint64_t edge_rank(std::uint64_t seed, int u, int v) {
    if (u > v) std::swap(u, v);
    return hash_combine(seed, (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) |
                                  static_cast<std::uint32_t>(v));
}

namespace {

struct EdgeKey {
    int u, v;  // u < v
    bool operator==(const EdgeKey& o) const { return u == o.u && v == o.v; }
};
struct EdgeKeyHash {
    std::size_t operator()(const EdgeKey& e) const {
        return static_cast<std::size_t>(
            splitmix64((static_cast<std::uint64_t>(static_cast<std::uint32_t>(e.u)) << 32) |
                       static_cast<std::uint32_t>(e.v)));
    }
};

EdgeKey make_key(int u, int v) {
    if (u > v) std::swap(u, v);
    return {u, v};
}

bool rank_less(std::uint64_t seed, const EdgeKey& a, const EdgeKey& b) {
    const std::uint64_t ra = edge_rank(seed, a.u, a.v);
    const std::uint64_t rb = edge_rank(seed, b.u, b.v);
    if (ra != rb) return ra < rb;
    if (a.u != b.u) return a.u < b.u;
    return a.v < b.v;
}

/// Local rank-greedy matching simulation with per-run memoization.
class LocalMatcher {
public:
    LocalMatcher(const NeighborOracle& oracle, std::uint64_t rank_seed)
        : oracle_(&oracle), seed_(rank_seed) {}

    bool vertex_matched(int v) {
        for (const EdgeKey& e : incident_sorted(v))
            if (edge_in_matching(e)) return true;
        return false;
    }

private:
    const std::vector<EdgeKey>& incident_sorted(int v) {
        auto it = incident_.find(v);
        if (it != incident_.end()) return it->second;
        std::vector<EdgeKey> list;
        for (int u : oracle_->neighbors(v)) list.push_back(make_key(v, u));
        std::sort(list.begin(), list.end(),
                  [this](const EdgeKey& a, const EdgeKey& b) { return rank_less(seed_, a, b); });
        return incident_.emplace(v, std::move(list)).first->second;
    }

    // An edge joins the greedy matching iff every lower-ranked incident edge
    // stays out of it.
    bool edge_in_matching(const EdgeKey& e) {
        auto memo = edge_memo_.find(e);
        if (memo != edge_memo_.end()) return memo->second;
        bool in = true;
        for (int endpoint : {e.u, e.v}) {
            for (const EdgeKey& f : incident_sorted(endpoint)) {
                if (!rank_less(seed_, f, e)) break;
                if (f == e) continue;
                if (edge_in_matching(f)) {
                    in = false;
                    break;
                }
            }
            if (!in) break;
        }
        edge_memo_.emplace(e, in);
        return in;
    }

    const NeighborOracle* oracle_;
    std::uint64_t seed_;
    std::unordered_map<int, std::vector<EdgeKey>> incident_;
    std::unordered_map<EdgeKey, bool, EdgeKeyHash> edge_memo_;
};

}  // namespace

std::vector<std::pair<int, int>> greedy_maximal_matching(
    const std::vector<std::pair<int, int>>& edges, std::uint64_t rank_seed) {
    std::unordered_set<EdgeKey, EdgeKeyHash> seen;
    std::vector<EdgeKey> keys;
    keys.reserve(edges.size());
    for (auto [u, v] : edges) {
        if (u == v) throw std::invalid_argument("self-loop edge");
        const EdgeKey key = make_key(u, v);
        if (!seen.insert(key).second) throw std::invalid_argument("duplicate edge");
        keys.push_back(key);
    }
    std::sort(keys.begin(), keys.end(), [rank_seed](const EdgeKey& a, const EdgeKey& b) {
        return rank_less(rank_seed, a, b);
    });

    std::unordered_set<int> matched;
    std::vector<std::pair<int, int>> out;
    for (const EdgeKey& e : keys) {
        if (matched.count(e.u) || matched.count(e.v)) continue;
        matched.insert(e.u);
        matched.insert(e.v);
        out.push_back({e.u, e.v});
    }
    return out;
}

MatchingEstimate estimate_maximal_matching(const NeighborOracle& oracle, int Z, double eps,
                                           std::uint64_t seed, int sample_cap) {
    if (eps <= 0.0 || eps >= 1.0) throw std::invalid_argument("eps must lie in (0,1)");
    MatchingEstimate out;
    if (Z <= 0) return out;

    const std::uint64_t probes_before = oracle.probe_count();
    const double want = std::ceil(3.0 * std::log(std::max(2.0, static_cast<double>(Z))) / (eps * eps));
    int samples = static_cast<int>(std::min<double>(want, sample_cap));
    samples = std::max(samples, 1);

    LocalMatcher matcher(oracle, seed);
    int matched = 0;
    if (samples >= Z) {
        // The sample budget covers the whole vertex set: evaluate it exactly.
        out.exhaustive = true;
        samples = Z;
        for (int v = 0; v < Z; ++v) matched += matcher.vertex_matched(v) ? 1 : 0;
    } else {
        auto rng = make_rng(derive_seed(seed, 0x5a17));
        std::uniform_int_distribution<int> pick(0, Z - 1);
        for (int s = 0; s < samples; ++s) matched += matcher.vertex_matched(pick(rng)) ? 1 : 0;
    }

    out.samples = samples;
    out.size = 0.5 * static_cast<double>(matched) / samples * Z;
    out.size = std::clamp(out.size, 0.0, Z / 2.0);
    out.probes = oracle.probe_count() - probes_before;
    return out;
}

std::vector<std::pair<int, int>> merge_maximal_matchings(
    const std::vector<std::pair<int, int>>& m1, const std::vector<std::pair<int, int>>& m2,
    const std::vector<std::pair<int, int>>& h1_edges,
    const std::vector<std::pair<int, int>>& h2_edges) {
    // Keep the larger matching whole; then |merged| >= max(|m1|,|m2|) >=
    // (|m1|+|m2|)/2, while the greedy completion over the other side's edges
    // restores maximality there.
    const bool first_larger = m1.size() >= m2.size();
    const auto& keep = first_larger ? m1 : m2;
    const auto& other = first_larger ? m2 : m1;
    const auto& other_edges = first_larger ? h2_edges : h1_edges;

    std::unordered_set<int> matched;
    std::vector<std::pair<int, int>> out;
    auto try_add = [&](int u, int v) {
        if (matched.count(u) || matched.count(v)) return;
        matched.insert(u);
        matched.insert(v);
        out.push_back({u, v});
    };
    for (auto [u, v] : keep) try_add(u, v);
    for (auto [u, v] : other) try_add(u, v);
    for (auto [u, v] : other_edges) try_add(u, v);
    return out;
}

}  // namespace stq
