#include <doctest.h>

#include <cmath>

#include "stq/generators.hpp"
#include "stq/hierarchy.hpp"
#include "stq/metric.hpp"

using namespace stq;

namespace {

MetricInstance terminal_metric_from(const std::vector<std::vector<double>>& d) {
    const int k = static_cast<int>(d.size());
    std::vector<Weight> w(static_cast<std::size_t>(k) * k, 0.0);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) w[static_cast<std::size_t>(i) * k + j] = d[i][j];
    std::vector<PointId> terms(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) terms[static_cast<std::size_t>(i)] = i;
    return MetricInstance::from_weights(k, terms, w);
}

}  // namespace

TEST_CASE("weight levels respect the half-open bands") {
    const double eps = 0.1;
    CHECK(weight_level(0.5, eps) == 0);
    CHECK(weight_level(1.0, eps) == 1);
    CHECK(weight_level(1.0999, eps) == 1);
    CHECK(weight_level(1.1, eps) == 2);  // exactly (1+eps)^1 opens level 2
    for (int i = 1; i < 40; ++i) {
        const double boundary = std::pow(1.0 + eps, i);
        CHECK(weight_level(boundary * 0.999999, eps) == i);
        CHECK(weight_level(boundary, eps) == i + 1);
    }
}

TEST_CASE("preprocessing scales terminal distances into [1, k^2]") {
    MetricInstance tm = terminal_metric_from({{0, 2, 4}, {2, 0, 8}, {4, 8, 0}});
    // Metric check: 8 <= 2+4? No. Fix: use distances {2,4,6}.
    tm = terminal_metric_from({{0, 2, 4}, {2, 0, 6}, {4, 6, 0}});
    Preprocessed prep = preprocess_and_scale(tm, {10, 11, 12});
    CHECK_FALSE(prep.degenerate);
    CHECK(prep.scale == doctest::Approx(2.0));
    CHECK(prep.removed.empty());
    CHECK(prep.scaled_terminal_metric.weight(0, 1) == doctest::Approx(1.0));
    CHECK(prep.scaled_terminal_metric.weight(0, 2) == doctest::Approx(2.0));
    CHECK(prep.scaled_terminal_metric.weight(1, 2) == doctest::Approx(3.0));
}

TEST_CASE("preprocessing drops near-duplicate terminals") {
    // d(0,1) tiny compared to the diameter/k^2 cutoff.
    const double tiny = 0.05;
    MetricInstance tm = terminal_metric_from({{0, tiny, 10, 10},
                                              {tiny, 0, 10, 10},
                                              {10, 10, 0, 10},
                                              {10, 10, 10, 0}});
    Preprocessed prep = preprocess_and_scale(tm, {100, 101, 102, 103});
    CHECK(prep.removed == std::vector<PointId>{101});
    CHECK(prep.kept == std::vector<int>{0, 2, 3});
    CHECK(prep.scale == doctest::Approx(10.0));
}

TEST_CASE("preprocessing reports coincident terminals as degenerate") {
    MetricInstance tm = terminal_metric_from({{0, 0}, {0, 0}});
    Preprocessed prep = preprocess_and_scale(tm, {0, 1});
    CHECK(prep.degenerate);
}

TEST_CASE("already scaled instances pass through unchanged") {
    MetricInstance tm = terminal_metric_from({{0, 1, 2}, {1, 0, 2}, {2, 2, 0}});
    Preprocessed prep = preprocess_and_scale(tm, {0, 1, 2});
    CHECK(prep.scale == doctest::Approx(1.0));
    CHECK(prep.removed.empty());
}

TEST_CASE("two terminals merge at the level of their distance") {
    MetricInstance tm = terminal_metric_from({{0, 1}, {1, 0}});
    LaminarHierarchy h = LaminarHierarchy::build(tm, 0.1, 10);
    // S_1 = singletons; the weight-1 edge is at level 1, so the merged set
    // first appears in S_2.
    CHECK(h.sets_at_level(1).size() == 2);
    CHECK(h.sets_at_level(2).size() == 1);
    CHECK(h.laminar_consistent());
}

TEST_CASE("uniform distance-one metric merges in a single level") {
    std::vector<std::vector<double>> d(5, std::vector<double>(5, 1.0));
    for (int i = 0; i < 5; ++i) d[i][i] = 0.0;
    LaminarHierarchy h = LaminarHierarchy::build(terminal_metric_from(d), 0.1, 20);
    CHECK(h.sets_at_level(1).size() == 5);
    CHECK(h.sets_at_level(2).size() == 1);
    const auto& root = h.nodes()[static_cast<std::size_t>(h.root())];
    CHECK(root.children.size() == 5);
    CHECK(h.mst_cost() == doctest::Approx(4.0));
}

TEST_CASE("partition metric splits into groups at the low level") {
    PartitionMetricSpec spec;
    spec.k = 400;
    spec.alpha = 2;
    spec.seed = 3;
    MetricInstance inst = gen_partition_metric(spec);
    CountingOracle oracle(inst);
    MetricInstance tm = induced_terminal_metric(oracle);
    Preprocessed prep = preprocess_and_scale(tm, inst.terminals());
    LaminarHierarchy h = LaminarHierarchy::build(prep.scaled_terminal_metric, 0.1, inst.n());

    // Weight-1 edges merge the two groups of 200 at level 2; the cross weight
    // 2*alpha = 4 lands at level 15 ((1.1)^14 <= 4 < (1.1)^15) and merges all.
    CHECK(h.sets_at_level(1).size() == 400);
    CHECK(h.sets_at_level(2).size() == 2);
    CHECK(weight_level(4.0, 0.1) == 15);
    CHECK(h.sets_at_level(15).size() == 2);
    CHECK(h.sets_at_level(16).size() == 1);
    CHECK(h.laminar_consistent());

    // Level weights: 398 weight-1 edges and one weight-4 edge.
    CHECK(h.level_weights().at(1) == doctest::Approx(398.0));
    CHECK(h.level_weights().at(15) == doctest::Approx(4.0));
    CHECK(h.is_heavy(1));
}

TEST_CASE("hierarchy is laminar on random instances") {
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        const int k = 6 + static_cast<int>(seed % 59);  // up to 64
        MetricInstance inst = gen_random_metric(RandomMetricKind::EuclideanPlane, k, k, seed);
        CountingOracle oracle(inst);
        Preprocessed prep = preprocess_and_scale(oracle);
        REQUIRE_FALSE(prep.degenerate);
        LaminarHierarchy h = LaminarHierarchy::build(prep.scaled_terminal_metric, 0.1, 2 * k);
        CHECK(h.laminar_consistent());

        // Level weights reproduce the MST cost.
        double sum = 0.0;
        for (const auto& [lvl, w] : h.level_weights()) sum += w;
        CHECK(sum == doctest::Approx(h.mst_cost()));
    }
}

TEST_CASE("representatives form a maximal separated subset") {
    MetricInstance inst = gen_random_metric(RandomMetricKind::EuclideanPlane, 24, 24, 9);
    CountingOracle oracle(inst);
    Preprocessed prep = preprocess_and_scale(oracle);
    LaminarHierarchy h = LaminarHierarchy::build(prep.scaled_terminal_metric, 0.1, 48);
    const int cap = static_cast<int>(h.level_cap());
    for (int level : {1, cap / 2, cap}) {
        for (int id : h.sets_at_level(level)) {
            const auto reps = h.representatives(id, level);
            const double radius = 0.1 * level_upper(level, 0.1);
            for (std::size_t i = 0; i < reps.size(); ++i)
                for (std::size_t j = i + 1; j < reps.size(); ++j)
                    CHECK(prep.scaled_terminal_metric.weight(reps[i], reps[j]) >= radius);
            // Maximality: every member is within radius of some representative.
            for (int t : h.nodes()[static_cast<std::size_t>(id)].members) {
                bool close = false;
                for (int r : reps)
                    if (t == r || prep.scaled_terminal_metric.weight(t, r) < radius) close = true;
                CHECK(close);
            }
        }
    }
}

TEST_CASE("terminal lookup finds the covering set per level") {
    MetricInstance tm = terminal_metric_from({{0, 1, 4, 4}, {1, 0, 4, 4}, {4, 4, 0, 1}, {4, 4, 1, 0}});
    LaminarHierarchy h = LaminarHierarchy::build(tm, 0.1, 16);
    const int pair_level = 2;   // weight-1 merges enter S_2
    const int all_level = weight_level(4.0, 0.1) + 1;
    CHECK(h.sets_at_level(pair_level).size() == 2);
    CHECK(h.node_of_terminal(0, pair_level) == h.node_of_terminal(1, pair_level));
    CHECK(h.node_of_terminal(0, pair_level) != h.node_of_terminal(2, pair_level));
    CHECK(h.node_of_terminal(0, all_level) == h.node_of_terminal(3, all_level));
}
