#include <doctest.h>

#include <set>
#include <sstream>

#include "stq/generators.hpp"
#include "stq/metric.hpp"

using namespace stq;

namespace {

MetricInstance uniform_metric(int n, int k, double w) {
    std::vector<Weight> m(static_cast<std::size_t>(n) * n, w);
    for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i) * n + i] = 0.0;
    std::vector<PointId> terms(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) terms[static_cast<std::size_t>(i)] = i;
    return MetricInstance::from_weights(n, terms, m);
}

}  // namespace

TEST_CASE("query returns the entry and counts distinct pairs only") {
    MetricInstance inst = uniform_metric(4, 2, 2.0);
    CountingOracle oracle(inst);
    CHECK(oracle.count() == 0);
    CHECK(oracle.query(0, 1) == doctest::Approx(2.0));
    CHECK(oracle.count() == 1);
    CHECK(oracle.query(1, 0) == doctest::Approx(2.0));
    CHECK(oracle.count() == 1);  // same unordered pair
    CHECK(oracle.query(0, 1) == doctest::Approx(2.0));
    CHECK(oracle.count() == 1);
    CHECK(oracle.was_queried(0, 1));
    CHECK_FALSE(oracle.was_queried(2, 3));
}

TEST_CASE("diagonal and out-of-range queries are rejected") {
    MetricInstance inst = uniform_metric(4, 2, 2.0);
    CountingOracle oracle(inst);
    CHECK_THROWS_AS(oracle.query(3, 3), std::invalid_argument);
    CHECK_THROWS_AS(oracle.query(0, 4), std::invalid_argument);
    CHECK_THROWS_AS(oracle.query(-1, 2), std::invalid_argument);
}

TEST_CASE("budget exhaustion raises instead of answering") {
    MetricInstance inst = uniform_metric(5, 3, 1.0);
    CountingOracle oracle(inst, 2);
    oracle.query(0, 1);
    oracle.query(0, 2);
    CHECK(oracle.query(0, 1) == doctest::Approx(1.0));  // repeats stay free
    CHECK_THROWS_AS(oracle.query(1, 2), QueryBudgetError);
    CHECK(oracle.count() == 2);
}

TEST_CASE("oracle count can never exceed the pair count") {
    MetricInstance inst = uniform_metric(6, 3, 2.0);
    CountingOracle oracle(inst);
    for (int rep = 0; rep < 3; ++rep)
        for (int u = 0; u < 6; ++u)
            for (int v = 0; v < 6; ++v)
                if (u != v) oracle.query(u, v);
    CHECK(oracle.count() == 15);
}

TEST_CASE("triangle verification accepts a constant metric") {
    MetricInstance inst = uniform_metric(5, 2, 2.0);
    CHECK_FALSE(verify_triangle_inequality(inst).has_value());
}

TEST_CASE("triangle verification reports the first violating triple") {
    // w(0,1)=5 but w(0,2)+w(2,1)=2.
    std::vector<Weight> w{0, 5, 1,  //
                          5, 0, 1,  //
                          1, 1, 0};
    MetricInstance inst = MetricInstance::from_weights(3, {0, 1}, w);
    auto bad = verify_triangle_inequality(inst);
    REQUIRE(bad.has_value());
    CHECK(bad->a == 0);
    CHECK(bad->b == 1);
    CHECK(bad->c == 2);
}

TEST_CASE("generated tree metric passes the exhaustive triangle check") {
    TreeMetricSpec spec;
    spec.d = 3;
    spec.n = 24;
    spec.variant = TreeVariant::N;
    spec.seed = 7;
    MetricInstance inst = gen_tree_metric(spec);
    CHECK_FALSE(verify_triangle_inequality(inst).has_value());
}

TEST_CASE("induced terminal metric consumes exactly the unqueried pairs") {
    MetricInstance inst = uniform_metric(8, 3, 2.0);
    CountingOracle oracle(inst);
    MetricInstance tm = induced_terminal_metric(oracle);
    CHECK(oracle.count() == 3);
    CHECK(tm.n() == 3);
    CHECK(tm.k() == 3);

    // A second materialization is free.
    induced_terminal_metric(oracle);
    CHECK(oracle.count() == 3);
}

TEST_CASE("induced terminal metric of a single terminal is a point") {
    MetricInstance inst = uniform_metric(4, 1, 2.0);
    CountingOracle oracle(inst);
    MetricInstance tm = induced_terminal_metric(oracle);
    CHECK(oracle.count() == 0);
    CHECK(tm.n() == 1);
}

TEST_CASE("induced terminal metric matches tree distances on the Y family") {
    TreeMetricSpec spec;
    spec.d = 2;
    spec.n = 7;
    spec.variant = TreeVariant::Y;
    spec.seed = 3;
    MetricInstance inst = gen_tree_metric(spec);
    CountingOracle oracle(inst);
    MetricInstance tm = induced_terminal_metric(oracle);
    CHECK(oracle.count() == 6);  // k=4 terminals
    // Leaf-pair distances in the depth-2 tree: 2 for siblings, 4 otherwise.
    std::multiset<double> dists;
    for (int i = 0; i < tm.n(); ++i)
        for (int j = i + 1; j < tm.n(); ++j) dists.insert(tm.weight(i, j));
    CHECK(dists == std::multiset<double>{2, 2, 4, 4, 4, 4});
    CHECK_FALSE(verify_triangle_inequality(tm).has_value());
}

TEST_CASE("triangle inequality survives terminal restriction") {
    MetricInstance inst = gen_random_metric(RandomMetricKind::Uniform12, 10, 5, 99);
    REQUIRE_FALSE(verify_triangle_inequality(inst).has_value());
    CountingOracle oracle(inst);
    MetricInstance tm = induced_terminal_metric(oracle);
    CHECK_FALSE(verify_triangle_inequality(tm).has_value());
}

TEST_CASE("instance files round-trip and validate") {
    MetricInstance inst = gen_random_metric(RandomMetricKind::Uniform12, 9, 4, 123);
    std::stringstream buf;
    save_instance(inst, buf);
    MetricInstance back = load_instance(buf);
    CHECK(back.n() == inst.n());
    CHECK(back.terminals() == inst.terminals());
    for (int u = 0; u < inst.n(); ++u)
        for (int v = 0; v < inst.n(); ++v) CHECK(back.weight(u, v) == inst.weight(u, v));

    std::stringstream bad;
    bad << "3 2\n0 1\n0 5 1\n5 0 1\n1 1 0\n";
    CHECK_THROWS_WITH_AS(load_instance(bad), doctest::Contains("triangle"), std::runtime_error);
}

TEST_CASE("steiner tree validity checks structure and cost") {
    MetricInstance inst = uniform_metric(4, 3, 2.0);
    SteinerTree tree;
    tree.edges = {{0, 1, 2.0}, {1, 2, 2.0}};
    tree.cost = 4.0;
    CHECK(tree.valid_for(inst));

    tree.cost = 5.0;
    CHECK_FALSE(tree.valid_for(inst));  // cost mismatch

    tree.edges.push_back({0, 2, 2.0});
    tree.cost = 6.0;
    CHECK_FALSE(tree.valid_for(inst));  // cycle

    SteinerTree missing;
    missing.edges = {{0, 1, 2.0}};
    missing.cost = 2.0;
    CHECK_FALSE(missing.valid_for(inst));  // terminal 2 not spanned
}
