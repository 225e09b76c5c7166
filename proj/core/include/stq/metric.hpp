#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace stq {

using PointId = int;
using Weight = double;

class QueryBudgetError : public std::runtime_error {
public:
    explicit QueryBudgetError(const std::string& what) : std::runtime_error(what) {}
};

/// A finite metric space with a designated terminal subset.
/// Immutable after construction; safe to share read-only between threads.
class MetricInstance {
public:
    MetricInstance() = default;

    /// `weights` is a row-major n*n matrix. Symmetry and a zero diagonal are
    /// enforced here; the triangle inequality is checked separately via
    /// verify_triangle_inequality (generators guarantee it, file loading
    /// validates it).
    static MetricInstance from_weights(int n, std::vector<PointId> terminals,
                                       std::vector<Weight> weights);

    int n() const { return n_; }
    int k() const { return static_cast<int>(terminals_.size()); }

    Weight weight(PointId u, PointId v) const { return weights_[static_cast<std::size_t>(u) * n_ + v]; }

    const std::vector<PointId>& terminals() const { return terminals_; }
    bool is_terminal(PointId v) const { return is_terminal_[static_cast<std::size_t>(v)]; }
    std::vector<PointId> steiner_points() const;

    void check_ids(PointId u, PointId v) const;

private:
    int n_ = 0;
    std::vector<PointId> terminals_;
    std::vector<char> is_terminal_;
    std::vector<Weight> weights_;
};

struct TriangleViolation {
    PointId a, b, c;  // w(a,b) > w(a,c) + w(c,b)
};

/// Returns the lexicographically first violating triple, or nullopt if the
/// instance is a (pseudo)metric.
std::optional<TriangleViolation> verify_triangle_inequality(const MetricInstance& instance);

/// Gatekeeper for all weight lookups. Counts distinct unordered pairs; an
/// optional budget turns an exceeded query bound into a hard error so tests
/// can assert query complexity.
class CountingOracle {
public:
    explicit CountingOracle(const MetricInstance& instance,
                            std::optional<std::uint64_t> budget = std::nullopt);

    Weight query(PointId u, PointId v);

    std::uint64_t count() const { return count_; }
    bool was_queried(PointId u, PointId v) const;
    const MetricInstance& instance() const { return *instance_; }
    std::optional<std::uint64_t> budget() const { return budget_; }

private:
    std::size_t pair_index(PointId u, PointId v) const;

    const MetricInstance* instance_;
    // Distinct-pair membership as a bitset over the n(n-1)/2 unordered pairs.
    std::vector<std::uint64_t> queried_;
    std::uint64_t count_ = 0;
    std::optional<std::uint64_t> budget_;
};

struct SteinerTree {
    struct Edge {
        PointId u, v;
        Weight w;
    };
    std::vector<Edge> edges;
    double cost = 0.0;

    /// True iff the edge set is a tree on its vertex set and spans every
    /// terminal of `instance`, and `cost` matches the edge sum.
    bool valid_for(const MetricInstance& instance, double rel_tol = 1e-9) const;
    std::vector<PointId> vertex_set() const;
};

/// Materializes the metric induced on the terminal set (point i of the result
/// is terminal i of the source). Consumes one oracle query per previously
/// unqueried terminal pair.
MetricInstance induced_terminal_metric(CountingOracle& oracle);

/// Text instance format: line 1 "n k"; line 2 the k terminal ids; then n
/// rows of n weights.
void save_instance(const MetricInstance& instance, std::ostream& out);
void save_instance_file(const MetricInstance& instance, const std::string& path);
MetricInstance load_instance(std::istream& in, bool validate_triangle = true);
MetricInstance load_instance_file(const std::string& path, bool validate_triangle = true);

}  // namespace stq
