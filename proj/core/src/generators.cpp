#include "stq/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "stq/hashing.hpp"

namespace stq {

namespace {

// Applies a seeded uniform relabeling of point ids and returns the finished
// instance. Realizes the "randomly named vertices" instance distributions
// without storing the mapping.
MetricInstance relabel_and_build(int n, const std::vector<PointId>& terminals,
                                 const std::vector<Weight>& w, std::uint64_t seed) {
    std::vector<PointId> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    auto rng = make_rng(derive_seed(seed, 0x9e1b));
    std::shuffle(perm.begin(), perm.end(), rng);

    std::vector<Weight> out(static_cast<std::size_t>(n) * n, 0.0);
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v)
            out[static_cast<std::size_t>(perm[u]) * n + perm[v]] =
                w[static_cast<std::size_t>(u) * n + v];

    std::vector<PointId> ts;
    ts.reserve(terminals.size());
    for (PointId t : terminals) ts.push_back(perm[static_cast<std::size_t>(t)]);
    std::sort(ts.begin(), ts.end());
    return MetricInstance::from_weights(n, std::move(ts), std::move(out));
}

void set_weight(std::vector<Weight>& w, int n, PointId u, PointId v, Weight x) {
    w[static_cast<std::size_t>(u) * n + v] = x;
    w[static_cast<std::size_t>(v) * n + u] = x;
}

}  // namespace

std::pair<std::int64_t, std::int64_t> eval_AB_recurrence(int d) {
    if (d < 1) throw std::invalid_argument("depth must be at least 1");
    std::int64_t a = 2, b = 2;
    for (int i = 1; i < d; ++i) {
        // A(i+1) = A(i) + B(i) + 2^{i-1} + 2^i ; B(i+1) = 2 A(i) + 2^{i+1}
        const std::int64_t p = std::int64_t{1} << (i - 1);
        const std::int64_t na = a + b + p + 2 * p;
        const std::int64_t nb = 2 * a + 4 * p;
        a = na;
        b = nb;
    }
    return {a, b};
}

MetricInstance gen_tree_metric(const TreeMetricSpec& spec) {
    const int d = spec.d;
    if (d < 1 || d > 24) throw std::invalid_argument("tree depth out of range");
    const int num_nodes = (1 << (d + 1)) - 1;
    const int num_leaves = 1 << d;
    const int num_internal = num_nodes - num_leaves;
    if (spec.n < num_nodes)
        throw std::invalid_argument("n too small: need at least 2^{d+1}-1 points");

    // Heap layout: node 0 is the root, children of x are 2x+1 and 2x+2.
    auto level_of = [](int x) {
        int lvl = 0;
        while (x > 0) {
            x = (x - 1) / 2;
            ++lvl;
        }
        return lvl;
    };
    // Edge weight between a level-i node and its parent.
    auto edge_weight = [d](int child_level) -> double {
        return child_level == d ? 1.0 : static_cast<double>(std::int64_t{1} << ((d - 1) - child_level));
    };
    auto tree_dist = [&](int x, int y) -> double {
        double dist = 0.0;
        int lx = level_of(x), ly = level_of(y);
        while (lx > ly) {
            dist += edge_weight(lx--);
            x = (x - 1) / 2;
        }
        while (ly > lx) {
            dist += edge_weight(ly--);
            y = (y - 1) / 2;
        }
        while (x != y) {
            dist += edge_weight(lx) + edge_weight(ly);
            --lx;
            --ly;
            x = (x - 1) / 2;
            y = (y - 1) / 2;
        }
        return dist;
    };
    // Distance from a level-l node down to any leaf in its subtree.
    auto down_dist = [d](int lvl) -> double {
        return lvl == d ? 0.0 : static_cast<double>(std::int64_t{1} << ((d - 1) - lvl));
    };

    // Group sizes: leaves hold a single vertex; internal groups share the rest
    // as evenly as possible, ceilings going to the lowest node indices.
    const int rest = spec.n - num_leaves;
    const int base = rest / num_internal;
    const int extra = rest % num_internal;

    std::vector<int> group_of(static_cast<std::size_t>(spec.n));
    std::vector<PointId> special(static_cast<std::size_t>(num_nodes));
    int next_id = 0;
    for (int x = 0; x < num_nodes; ++x) {
        const bool leaf = level_of(x) == d;
        const int size = leaf ? 1 : base + (x < extra ? 1 : 0);
        special[static_cast<std::size_t>(x)] = next_id;
        for (int j = 0; j < size; ++j) group_of[static_cast<std::size_t>(next_id++)] = x;
    }
    if (next_id != spec.n) throw std::logic_error("tree metric group sizing failed");

    std::vector<char> is_special(static_cast<std::size_t>(spec.n), 0);
    for (int x = 0; x < num_nodes; ++x)
        is_special[static_cast<std::size_t>(special[static_cast<std::size_t>(x)])] = 1;

    std::vector<Weight> w(static_cast<std::size_t>(spec.n) * spec.n, 0.0);
    for (PointId u = 0; u < spec.n; ++u) {
        for (PointId v = u + 1; v < spec.n; ++v) {
            const int x = group_of[static_cast<std::size_t>(u)];
            const int y = group_of[static_cast<std::size_t>(v)];
            const int deeper = level_of(x) >= level_of(y) ? x : y;
            double value = 2.0 * down_dist(level_of(deeper)) + tree_dist(x, y);
            if (spec.variant == TreeVariant::Y && is_special[static_cast<std::size_t>(u)] &&
                is_special[static_cast<std::size_t>(v)])
                value = tree_dist(x, y);
            set_weight(w, spec.n, u, v, value);
        }
    }

    std::vector<PointId> terminals;
    terminals.reserve(static_cast<std::size_t>(num_leaves));
    for (int x = 0; x < num_nodes; ++x)
        if (level_of(x) == d) terminals.push_back(special[static_cast<std::size_t>(x)]);

    return relabel_and_build(spec.n, terminals, w, spec.seed);
}

int star_hub_count(const StarInstanceSpec& spec) {
    const int group = static_cast<int>(std::floor(1.0 / spec.eps));
    if (group < 1) throw std::invalid_argument("eps must be at most 1");
    return spec.k / group;
}

MetricInstance gen_star_instance(const StarInstanceSpec& spec) {
    if (spec.k < 1 || spec.k >= spec.n)
        throw std::invalid_argument("star instance needs 1 <= k < n");
    const int n = spec.n, k = spec.k;
    std::vector<Weight> w(static_cast<std::size_t>(n) * n, 2.0);
    for (int u = 0; u < n; ++u) w[static_cast<std::size_t>(u) * n + u] = 0.0;

    std::vector<PointId> terminals(static_cast<std::size_t>(k));
    std::iota(terminals.begin(), terminals.end(), 0);
    std::vector<PointId> steiner(static_cast<std::size_t>(n - k));
    std::iota(steiner.begin(), steiner.end(), k);
    auto rng = make_rng(derive_seed(spec.seed, 0x57a7));

    switch (spec.mode) {
        case StarMode::Empty:
            break;
        case StarMode::SingleHub: {
            const PointId hub = steiner[std::uniform_int_distribution<std::size_t>(
                0, steiner.size() - 1)(rng)];
            for (PointId t : terminals) set_weight(w, n, hub, t, 1.0);
            break;
        }
        case StarMode::MultiHub: {
            const int group = static_cast<int>(std::floor(1.0 / spec.eps));
            if (group < 1) throw std::invalid_argument("eps must be at most 1");
            const int t = k / group;
            if (t < 1) throw std::invalid_argument("k too small for the group size");
            if (n - k < t) throw std::invalid_argument("not enough Steiner points for the hubs");
            std::shuffle(steiner.begin(), steiner.end(), rng);
            // Groups of size floor(1/eps); the last group absorbs the remainder.
            for (int i = 0; i < t; ++i) {
                const int lo = i * group;
                const int hi = (i == t - 1) ? k : (i + 1) * group;
                const PointId hub = steiner[static_cast<std::size_t>(i)];
                for (int j = lo; j < hi; ++j) set_weight(w, n, hub, terminals[static_cast<std::size_t>(j)], 1.0);
            }
            break;
        }
    }
    return MetricInstance::from_weights(n, std::move(terminals), std::move(w));
}

MetricInstance gen_partition_metric(const PartitionMetricSpec& spec) {
    if (spec.alpha < 2) throw std::invalid_argument("alpha must be at least 2");
    const int group = 100 * spec.alpha;
    if (spec.k <= 0 || spec.k % group != 0)
        throw std::invalid_argument("k must be divisible by 100*alpha");
    const int n = spec.k;
    const int t = spec.k / group;

    std::vector<PointId> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    auto rng = make_rng(derive_seed(spec.seed, 0xbead));
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<int> part(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) part[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = i / group;

    std::vector<Weight> w(static_cast<std::size_t>(n) * n);
    for (PointId u = 0; u < n; ++u)
        for (PointId v = 0; v < n; ++v)
            w[static_cast<std::size_t>(u) * n + v] =
                u == v ? 0.0
                       : (part[static_cast<std::size_t>(u)] == part[static_cast<std::size_t>(v)]
                              ? 1.0
                              : 2.0 * spec.alpha);
    (void)t;
    std::vector<PointId> terminals(static_cast<std::size_t>(n));
    std::iota(terminals.begin(), terminals.end(), 0);
    return MetricInstance::from_weights(n, std::move(terminals), std::move(w));
}

MetricInstance gen_dydn_instance(const DyDnSpec& spec) {
    const int m = static_cast<int>(std::llround(std::pow(static_cast<double>(spec.k), 0.2)));
    if (m < 1 || m * m * m * m * m != spec.k)
        throw std::invalid_argument("k must be a fifth power so k^{2/5}, k^{3/5} are integral");
    if (spec.inv_eps < 2) throw std::invalid_argument("inv_eps must be at least 2");
    const int d = m * m;        // special groups
    const int dp = m * m * m;   // regular groups
    const int special_count = d * spec.inv_eps;
    const int terminal_count = spec.k + special_count;
    const int block = special_count;  // |V_i| matches |S|
    const int matched_steiner = dp * block;
    if (spec.n < terminal_count + matched_steiner)
        throw std::invalid_argument("n too small for the DyDn layout");

    const int n = spec.n;
    std::vector<Weight> w(static_cast<std::size_t>(n) * n, 2.0);
    for (int u = 0; u < n; ++u) w[static_cast<std::size_t>(u) * n + u] = 0.0;

    // Layout before relabeling: special terminals, regular terminals, the d'
    // matched Steiner blocks, then the free block V_0.
    auto special_id = [&](int j, int i) { return j * spec.inv_eps + i; };
    auto regular_id = [&](int g, int i) { return special_count + g * (m * m) + i; };
    auto block_id = [&](int b, int i) { return terminal_count + b * block + i; };

    for (int g = 0; g < dp; ++g)
        for (int i = 0; i < m * m; ++i)
            for (int j = i + 1; j < m * m; ++j)
                set_weight(w, n, regular_id(g, i), regular_id(g, j), 0.0);

    // Perfect matching M_b pairs the s-th special terminal with the s-th
    // vertex of block b.
    for (int b = 0; b < dp; ++b)
        for (int s = 0; s < special_count; ++s) set_weight(w, n, s, block_id(b, s), 1.0);

    if (spec.variant == TreeVariant::Y) {
        auto rng = make_rng(derive_seed(spec.seed, 0xdd31));
        std::uniform_int_distribution<int> pick(0, dp - 1);
        for (int j = 0; j < d; ++j) {
            const int target = pick(rng);
            const PointId hub = block_id(target, special_id(j, 0));  // matched with s_{j,1}
            for (int i = 0; i < spec.inv_eps; ++i) {
                const PointId u = special_id(j, i);
                set_weight(w, n, u, block_id(target, u), 2.0);
                set_weight(w, n, u, hub, 1.0);
            }
        }
    }

    std::vector<PointId> terminals(static_cast<std::size_t>(terminal_count));
    std::iota(terminals.begin(), terminals.end(), 0);
    return relabel_and_build(n, terminals, w, spec.seed);
}

MetricInstance gen_random_metric(RandomMetricKind kind, int n, int k, std::uint64_t seed) {
    if (n < 1 || k < 1 || k > n) throw std::invalid_argument("need 1 <= k <= n");
    auto rng = make_rng(derive_seed(seed, 0xfeed));
    std::vector<Weight> w(static_cast<std::size_t>(n) * n, 0.0);

    switch (kind) {
        case RandomMetricKind::Uniform12: {
            std::uniform_int_distribution<int> coin(1, 2);
            for (PointId u = 0; u < n; ++u)
                for (PointId v = u + 1; v < n; ++v)
                    set_weight(w, n, u, v, static_cast<double>(coin(rng)));
            break;
        }
        case RandomMetricKind::EuclideanPlane: {
            std::uniform_real_distribution<double> coord(0.0, 1.0);
            std::vector<double> xs(static_cast<std::size_t>(n)), ys(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) {
                xs[static_cast<std::size_t>(i)] = coord(rng);
                ys[static_cast<std::size_t>(i)] = coord(rng);
            }
            for (PointId u = 0; u < n; ++u)
                for (PointId v = u + 1; v < n; ++v)
                    set_weight(w, n, u, v,
                               std::hypot(xs[static_cast<std::size_t>(u)] - xs[static_cast<std::size_t>(v)],
                                          ys[static_cast<std::size_t>(u)] - ys[static_cast<std::size_t>(v)]));
            break;
        }
        case RandomMetricKind::RandomTree: {
            std::uniform_int_distribution<int> weight(1, 8);
            std::vector<std::vector<std::pair<int, double>>> adj(static_cast<std::size_t>(n));
            for (int v = 1; v < n; ++v) {
                std::uniform_int_distribution<int> parent(0, v - 1);
                const int p = parent(rng);
                const double ew = static_cast<double>(weight(rng));
                adj[static_cast<std::size_t>(v)].push_back({p, ew});
                adj[static_cast<std::size_t>(p)].push_back({v, ew});
            }
            for (int src = 0; src < n; ++src) {
                std::vector<double> dist(static_cast<std::size_t>(n), -1.0);
                std::vector<int> stack{src};
                dist[static_cast<std::size_t>(src)] = 0.0;
                while (!stack.empty()) {
                    const int u = stack.back();
                    stack.pop_back();
                    for (auto [v, ew] : adj[static_cast<std::size_t>(u)]) {
                        if (dist[static_cast<std::size_t>(v)] < 0.0) {
                            dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + ew;
                            stack.push_back(v);
                        }
                    }
                }
                for (int v = 0; v < n; ++v)
                    w[static_cast<std::size_t>(src) * n + v] = dist[static_cast<std::size_t>(v)];
            }
            break;
        }
    }

    std::vector<PointId> terminals(static_cast<std::size_t>(k));
    std::iota(terminals.begin(), terminals.end(), 0);
    return MetricInstance::from_weights(n, std::move(terminals), std::move(w));
}

MetricInstance gen_from_json(const std::string& json_text) {
    const nlohmann::json doc = nlohmann::json::parse(json_text);
    const std::string family = doc.at("family").get<std::string>();
    const nlohmann::json params = doc.value("params", nlohmann::json::object());
    const std::uint64_t seed = doc.value("seed", std::uint64_t{0});

    auto variant_of = [](const std::string& s) {
        if (s == "Y" || s == "y") return TreeVariant::Y;
        if (s == "N" || s == "n") return TreeVariant::N;
        throw std::invalid_argument("variant must be Y or N");
    };

    if (family == "tree") {
        TreeMetricSpec spec;
        spec.d = params.at("d").get<int>();
        spec.n = params.value("n", (1 << (spec.d + 1)) - 1);
        spec.variant = variant_of(params.value("variant", std::string("N")));
        spec.seed = seed;
        return gen_tree_metric(spec);
    }
    if (family == "star") {
        StarInstanceSpec spec;
        spec.n = params.at("n").get<int>();
        spec.k = params.at("k").get<int>();
        spec.eps = params.value("eps", 0.5);
        const std::string mode = params.value("mode", std::string("multi_hub"));
        if (mode == "multi_hub")
            spec.mode = StarMode::MultiHub;
        else if (mode == "single_hub")
            spec.mode = StarMode::SingleHub;
        else if (mode == "empty")
            spec.mode = StarMode::Empty;
        else
            throw std::invalid_argument("unknown star mode: " + mode);
        spec.seed = seed;
        return gen_star_instance(spec);
    }
    if (family == "partition") {
        PartitionMetricSpec spec;
        spec.k = params.at("k").get<int>();
        spec.alpha = params.at("alpha").get<int>();
        spec.seed = seed;
        return gen_partition_metric(spec);
    }
    if (family == "dydn") {
        DyDnSpec spec;
        spec.k = params.at("k").get<int>();
        spec.inv_eps = params.at("inv_eps").get<int>();
        spec.n = params.at("n").get<int>();
        spec.variant = variant_of(params.value("variant", std::string("N")));
        spec.seed = seed;
        return gen_dydn_instance(spec);
    }

    RandomMetricKind kind;
    if (family == "uniform_12")
        kind = RandomMetricKind::Uniform12;
    else if (family == "euclidean_plane")
        kind = RandomMetricKind::EuclideanPlane;
    else if (family == "random_tree")
        kind = RandomMetricKind::RandomTree;
    else
        throw std::invalid_argument("unknown instance family: " + family);
    return gen_random_metric(kind, params.at("n").get<int>(), params.at("k").get<int>(), seed);
}

}  // namespace stq
