#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace stq {

/// Membership-oracle access to a set-cover instance (U, W). Elements are
/// 0..universe-1, sets are 0..num_sets-1; contents are reachable only through
/// membership(), which counts probes.
class SetCoverView {
public:
    using MembershipFn = std::function<bool(int element, int set)>;

    SetCoverView(int universe, int num_sets, MembershipFn membership)
        : universe_(universe), num_sets_(num_sets), membership_(std::move(membership)) {}

    bool membership(int element, int set) const {
        ++probes_;
        return membership_(element, set);
    }
    int universe_size() const { return universe_; }
    int num_sets() const { return num_sets_; }
    std::uint64_t probes() const { return probes_; }

private:
    int universe_;
    int num_sets_;
    MembershipFn membership_;
    mutable std::uint64_t probes_ = 0;
};

/// Explicit set system, mostly for tests, oracles and the CLI instance format.
struct SetSystem {
    int universe = 0;
    std::vector<std::vector<int>> sets;

    /// Appends a singleton {e} for every element that lacks one (the standing
    /// convention for set-cover instances here).
    SetSystem with_singletons() const;
    SetCoverView view() const;
};

/// Text format: line 1 "|U| |W|", then one line per set listing element ids.
SetSystem load_set_system(std::istream& in);
void save_set_system(const SetSystem& sys, std::ostream& out);

/// Exact minimum set-cover size via branch and bound (universe <= 20 keeps the
/// masks in one word). Throws if some element is uncoverable.
int exact_set_cover(const SetSystem& sys);

/// Indices (into sys.sets) of one optimal cover.
std::vector<int> exact_set_cover_solution(const SetSystem& sys);

/// Exact objective |U| - SC(U, W_{!=2}) used as the reference for the
/// estimator; size-2 sets are dropped (singletons are added first).
int exact_cover_objective(const SetSystem& sys, bool exclude_size_two);

struct AlgSetCoverParams {
    // Multipliers of the frequency-partition and set-split thresholds. The
    // defaults are the literal constants; scaling them down exercises the
    // high-frequency and dense-set branches at small instance sizes.
    double c_freq = 75.0;
    double c_n = 50.0;
    double c_split = 100.0;
    double c_q = 1.0;
    int matching_sample_cap = 1 << 12;
};

/// The frequency and density partitions the estimator is built on.
struct SetCoverPartition {
    double beta = 1.0;                 // max{k/n^{3/4}, 1}
    double big_n = 0.0;                // 50 n beta log n / (eps k)
    double freq_threshold = 0.0;       // sample-frequency cutoff for U_low
    double q = 0.0;                    // density-sample size
    std::vector<int> u_low, u_high;    // element partition
    std::vector<int> w1, w2;           // set partition (by density on U_low)
    std::vector<int> tilde_w;          // frequency-sample sets
    std::vector<int> hat_w;            // cover-sample sets for U_high
    std::vector<char> in_u_low;        // by element id
};

SetCoverPartition compute_setcover_partition(const SetCoverView& view, double eps,
                                             std::uint64_t seed,
                                             const AlgSetCoverParams& params = {});

/// All elements of U_low sharing some set with `e`, found by probing e against
/// every set and then each hit set against U_low. Sets whose U_low content has
/// exactly two elements are ignored when exclude_size_two is set.
std::vector<int> neighbors_in_H(const SetCoverView& view, const SetCoverPartition& partition,
                                int e, bool exclude_size_two);

struct SetCoverEstimate {
    double x = 0.0;      // (4, eps|U|)-estimate: Y <= x <= 4Y + eps|U|
    double x_raw = 0.0;  // |U_high| - eps|U|/10 + (x1+x2)/2, the evidence statistic
    double x1 = 0.0;     // matching estimate over the sparse-set graph
    double x2 = 0.0;     // dense-set contribution
    std::uint64_t probes = 0;
    int u_low_size = 0;
    int u_high_size = 0;
    int w2_size = 0;
    bool matching_exhaustive = false;
};

/// Membership-query estimator of |U| - SC(U, W_{!=2}) (or SC(U, W) with
/// exclude_size_two unset). The returned `x` satisfies Y <= x <= 4Y + eps|U|
/// with constant failure probability over seeds; `x_raw` is the underlying
/// combination used as local-evidence mass by the Steiner estimator.
SetCoverEstimate alg_set_cover(const SetCoverView& view, double eps, bool exclude_size_two,
                               std::uint64_t seed, const AlgSetCoverParams& params = {});

}  // namespace stq
