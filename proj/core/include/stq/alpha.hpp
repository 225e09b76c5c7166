#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "stq/baselines.hpp"
#include "stq/metric.hpp"

namespace stq {

/// One run of the sampled-core spanning algorithm: an MST over a random
/// terminal core T' plus a nearest-core edge for every remaining terminal.
struct AlphaRun {
    double alpha = 2.0;
    double beta = 0.0;                 // alpha / (100 log n)
    std::vector<PointId> core;         // T'
    SteinerTree tree;                  // spans all terminals
    std::unordered_map<PointId, PointId> attach;  // u -> f(u) for u outside the core
    std::uint64_t queries = 0;
    bool fallback = false;             // alpha below the threshold: T' = T
};

struct AlphaOptions {
    /// When alpha < fallback_threshold (default log^2 n, natural logs) the
    /// algorithm answers with the full terminal MST.
    double fallback_threshold = -1.0;  // negative: use log^2 n
    bool disable_fallback = false;
};

/// Queries only pairs with at least one endpoint in T' (at most k*ceil(k/beta)
/// of them) and always outputs a spanning tree of the terminal set of cost at
/// most alpha * ST with high probability.
AlphaRun approx_steiner_alpha(CountingOracle& oracle, double alpha, std::uint64_t seed,
                              const AlphaOptions& options = {});

struct EulerWindowReport {
    double window_length = 0.0;       // 20 beta log n
    int windows_checked = 0;
    bool xi_occurred = false;         // some window missed the core entirely
    double attach_sum = 0.0;          // sum of w(u, f(u)) over u outside the core
    double bound = 0.0;               // window_length * MST
    bool bound_holds = false;         // checked only when xi did not occur
};

/// Walks an Euler tour of tau*, checks that every window of the stated length
/// meets the sampled core, and verifies the resulting attach-cost bound.
/// Needs the full terminal metric, so this is an offline diagnostic.
EulerWindowReport euler_window_check(const AlphaRun& run, const TerminalMst& tau_star,
                                     const MetricInstance& instance);

}  // namespace stq
