#pragma once

#include <map>

#include "stq/metric.hpp"

namespace stq {

struct TerminalMst {
    SteinerTree tree;      // edges over the original terminal ids
    double cost = 0.0;

    /// Histogram of MST edge weight by level for a given granularity eps:
    /// an edge of weight w (assumed >= 1 after scaling) lies at the level i
    /// with (1+eps)^{i-1} <= w < (1+eps)^i.
    std::map<int, double> per_level_weight(double eps) const;
};

/// Exact MST of the metric induced on the terminals. Kruskal with ties broken
/// lexicographically on (weight, min id, max id); consumes at most k(k-1)/2
/// oracle queries.
TerminalMst terminal_mst(CountingOracle& oracle);

/// Same computation on an explicit all-terminal metric (no oracle involved).
TerminalMst terminal_mst_of(const MetricInstance& terminal_metric);

enum class ExactMethod { SubsetEnum, DreyfusWagner };

/// Optimal Steiner tree. SubsetEnum minimizes MST(T ∪ S') over Steiner subsets
/// S' and requires n-k <= 20; DreyfusWagner is the classic subset DP and
/// requires k <= 14.
SteinerTree exact_steiner(const MetricInstance& instance, ExactMethod method);

/// Terminal-incident approximation: starts from the terminal MST and greedily
/// applies strictly improving Steiner stars touching at most three terminals.
/// Queries only pairs with a terminal endpoint (at most nk of them); the
/// result never costs more than the terminal MST. No worst-case ratio is
/// claimed for this greedy.
SteinerTree good_tree_approx(CountingOracle& oracle);

/// Optimal tree among those whose every edge touches a terminal, by Steiner
/// subset enumeration over the terminal-incident edge graph (n-k <= 20).
/// Sits between exact_steiner and good_tree_approx in cost.
SteinerTree exact_good_tree(const MetricInstance& instance);

}  // namespace stq
