#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "stq/metric.hpp"

namespace stq {

/// Lazy exploration of one level's proximity structure over the terminals,
/// without the terminal metric in hand. Maintains seeded terminal ranks, the
/// rank-greedy maximal independent set at radius eps1*(1+eps)^level (the
/// "representatives"), the components these representatives induce under the
/// (1+3*eps1)*(1+eps)^level linking radius, and a bounded BFS over the
/// reachable components. Marks persist across calls, so repeated exploration
/// of one region is answered from state instead of fresh queries.
class ComponentExplorer {
public:
    ComponentExplorer(CountingOracle& oracle, std::vector<PointId> terminals, double scale,
                      int level, double eps, double eps1, double round_budget,
                      std::uint64_t seed);

    enum class Mark : std::uint8_t { Unknown, Representative, NonRepresentative };

    struct ComponentInfo {
        bool small = false;      // reach-closure fully explored within budget
        int component = -1;      // component id of the queried terminal
        std::vector<PointId> reps;      // representatives of that component
        int terminal_count = 0;         // terminals represented by it
        int region_rep_count = 0;       // representatives across the reach-closure
    };

    /// Walks the rank chain from u to a representative of u's component,
    /// marking discoveries along the way.
    PointId find_representative(PointId u);

    /// Explores everything reachable from u's component, up to the round
    /// budget. If the budget is exceeded the touched region is recorded as
    /// non-small and the call reports small = false.
    ComponentInfo bfs_component(PointId u);

    /// Representatives in decreasing rank order, stopping once `cap` have been
    /// found. Returns the list and whether the independent set was exhausted.
    std::pair<std::vector<PointId>, bool> enumerate_representatives(std::size_t cap);

    Mark mark(PointId u) const;
    std::uint64_t rank(PointId u) const;
    double radius() const { return radius_; }
    double link_radius() const { return link_radius_; }
    double round_budget() const { return round_budget_; }
    int level() const { return level_; }
    const std::vector<PointId>& terminals() const { return terminals_; }

private:
    int index_of(PointId u) const;
    double dist(PointId u, PointId v);
    int comp_root(int c);
    void merge_comps(int a, int b);
    void record_region(const std::vector<int>& comps, bool small);

    CountingOracle* oracle_;
    std::vector<PointId> terminals_;
    std::unordered_map<PointId, int> index_;
    double scale_;
    int level_;
    double radius_;
    double link_radius_;
    double round_budget_;

    std::vector<std::uint64_t> rank_;
    std::vector<Mark> mark_;
    std::vector<int> assigned_;   // terminal index -> component id (or -1)
    std::vector<char> in_big_;    // touched by a budget-terminated exploration

    std::vector<int> comp_parent_;               // DSU over component ids
    std::vector<std::vector<int>> comp_reps_;    // rep terminal indices per root
    std::vector<int> comp_terminals_;            // represented-terminal count per root

    struct Region {
        std::vector<int> comps;
        int total_reps = 0;
        bool small = false;
    };
    std::unordered_map<int, int> region_of_;  // comp root -> region index
    std::vector<Region> regions_;
};

}  // namespace stq
