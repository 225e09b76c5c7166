#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "stq/metric.hpp"

namespace stq {

enum class TreeVariant { Y, N };

/// Shortest-path-style metrics derived from a complete binary tree of depth d
/// with geometrically decreasing edge weights. Variant N charges a detour
/// through a leaf for every non-terminal pair; variant Y uses plain tree
/// distances between the special vertices. The two differ only on pairs of
/// non-terminal special vertices.
struct TreeMetricSpec {
    int d = 1;
    int n = 0;  // total points; needs n >= 2^{d+1} - 1
    TreeVariant variant = TreeVariant::N;
    std::uint64_t seed = 0;
};

enum class StarMode { MultiHub, SingleHub, Empty };

/// {1,2}-weight star-planting family. MultiHub hides t = floor(k/floor(1/eps))
/// hub vertices, each at distance 1 from its terminal group; SingleHub plants
/// one hub adjacent to every terminal; Empty has no hubs at all.
struct StarInstanceSpec {
    int n = 0;
    int k = 0;
    double eps = 0.5;  // group-size parameter (MultiHub only)
    StarMode mode = StarMode::MultiHub;
    std::uint64_t seed = 0;
};

/// All-terminal {1, 2*alpha} metric split into t = k/(100*alpha) groups.
struct PartitionMetricSpec {
    int k = 0;
    int alpha = 2;
    std::uint64_t seed = 0;
};

/// {0,1,2} metric with d = k^{2/5} special groups of size inv_eps, d' = k^{3/5}
/// regular groups of size k^{2/5}, and d' Steiner blocks each perfectly matched
/// to the special terminals. Variant Y rewires each special group onto a shared
/// secret hub.
struct DyDnSpec {
    int k = 0;  // must be a fifth power
    int inv_eps = 2;
    int n = 0;
    TreeVariant variant = TreeVariant::N;
    std::uint64_t seed = 0;
};

enum class RandomMetricKind { Uniform12, EuclideanPlane, RandomTree };

MetricInstance gen_tree_metric(const TreeMetricSpec& spec);
MetricInstance gen_star_instance(const StarInstanceSpec& spec);
MetricInstance gen_partition_metric(const PartitionMetricSpec& spec);
MetricInstance gen_dydn_instance(const DyDnSpec& spec);
MetricInstance gen_random_metric(RandomMetricKind kind, int n, int k, std::uint64_t seed);

/// A(d): optimal variant-N cost avoiding the root's special vertex;
/// B(d): optimal variant-N cost that uses it. Base case A(1) = B(1) = 2.
std::pair<std::int64_t, std::int64_t> eval_AB_recurrence(int d);

/// Number of hub groups the MultiHub family uses for these parameters.
int star_hub_count(const StarInstanceSpec& spec);

/// Parses a generator-spec JSON document {"family": ..., "params": {...},
/// "seed": u64} and runs the matching generator. Families: "tree", "star",
/// "partition", "dydn", "uniform_12", "euclidean_plane", "random_tree".
MetricInstance gen_from_json(const std::string& json_text);

}  // namespace stq
