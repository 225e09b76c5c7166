#pragma once

#include <map>
#include <vector>

#include "stq/baselines.hpp"
#include "stq/metric.hpp"

namespace stq {

/// Level of a weight for granularity eps: the i with (1+eps)^{i-1} <= w <
/// (1+eps)^i for w >= 1, and 0 for w < 1 (possible only for Steiner-incident
/// distances after scaling). Guarded against floating-point boundary error.
int weight_level(double w, double eps);

double level_upper(int level, double eps);  // (1+eps)^level

/// Result of the Step-1 preprocessing of a terminal metric: near-duplicate
/// terminals (pairwise distance <= D/k^2) are dropped, then everything is
/// scaled by the minimum surviving terminal distance so that terminal
/// distances lie in [1, k^2].
struct Preprocessed {
    bool degenerate = false;            // all terminal distances are zero
    double scale = 1.0;                 // divide original weights by this
    std::vector<int> kept;              // indices into the input terminal list
    std::vector<PointId> removed;       // original ids of dropped terminals
    MetricInstance scaled_terminal_metric;  // k' points, all terminals
};

/// `terminal_metric` is the materialized induced metric (point i = terminal i
/// of the original instance, as produced by induced_terminal_metric).
Preprocessed preprocess_and_scale(const MetricInstance& terminal_metric,
                                  const std::vector<PointId>& original_ids);

/// Oracle convenience overload; consumes at most k(k-1)/2 queries.
Preprocessed preprocess_and_scale(CountingOracle& oracle);

/// One set of the laminar family. A node represents the same vertex set for
/// every level in [level_created, level_absorbed).
struct HierarchyNode {
    int id = -1;
    int parent = -1;
    std::vector<int> children;
    int level_created = 0;
    int level_absorbed = 0;  // parent's level_created; root uses L+1
    std::vector<int> members;  // indices into the scaled terminal metric
};

/// The per-level component structure of the scaled terminal metric: S_i is the
/// partition of T into connected components of H_{i-1} (the graph of all
/// terminal edges of level < i), S is their union over levels (a laminar
/// family), and the partition tree records the merges. Level weights and the
/// heavy/light split refer to the terminal MST tau*.
class LaminarHierarchy {
public:
    /// `ambient_n` is the point count of the full instance (it enters the
    /// heavy-level threshold MST/(L log n)).
    static LaminarHierarchy build(const MetricInstance& scaled_terminal_metric, double eps,
                                  int ambient_n);

    int k() const { return metric_.k(); }
    double eps() const { return eps_; }
    double level_cap() const { return level_cap_; }  // L = ceil(log_{1+eps} k^2)
    const MetricInstance& scaled_metric() const { return metric_; }

    const std::vector<HierarchyNode>& nodes() const { return nodes_; }
    int root() const { return root_; }

    const TerminalMst& tau_star() const { return tau_star_; }
    double mst_cost() const { return tau_star_.cost; }

    /// w_i(tau*) by level; levels absent from the map have zero weight.
    const std::map<int, double>& level_weights() const { return level_weights_; }
    bool is_heavy(int level) const;
    double heavy_threshold() const;

    /// Node ids forming the partition S_level (level in [0, L]).
    std::vector<int> sets_at_level(int level) const;
    int node_of_terminal(int terminal_index, int level) const;

    /// Greedy maximal subset of the node's members with pairwise distance >=
    /// eps*(1+eps)^level, built in member order.
    std::vector<int> representatives(int node_id, int level) const;

    bool laminar_consistent() const;  // invariant check used by tests

private:
    MetricInstance metric_;
    double eps_ = 0.1;
    double level_cap_ = 0.0;
    int ambient_n_ = 0;
    std::vector<HierarchyNode> nodes_;
    int root_ = -1;
    std::vector<int> leaf_of_terminal_;
    TerminalMst tau_star_;
    std::map<int, double> level_weights_;
};

}  // namespace stq
