#include "stq/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace stq {

int weight_level(double w, double eps) {
    if (w < 1.0) return 0;
    const double log1p_eps = std::log1p(eps);
    int i = static_cast<int>(std::floor(std::log(w) / log1p_eps)) + 1;
    while (i > 1 && std::pow(1.0 + eps, i - 1) > w) --i;
    while (std::pow(1.0 + eps, i) <= w) ++i;
    return i;
}

double level_upper(int level, double eps) { return std::pow(1.0 + eps, level); }

Preprocessed preprocess_and_scale(const MetricInstance& terminal_metric,
                                  const std::vector<PointId>& original_ids) {
    const int k = terminal_metric.n();
    if (static_cast<int>(original_ids.size()) != k)
        throw std::invalid_argument("original id list size mismatch");

    Preprocessed out;
    double diameter = 0.0;
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) diameter = std::max(diameter, terminal_metric.weight(i, j));
    if (k <= 1 || diameter == 0.0) {
        out.degenerate = true;
        for (int i = 0; i < k; ++i) out.kept.push_back(i);
        return out;
    }

    // Drop near-duplicates: while some surviving pair is within D/k^2, delete
    // one endpoint (the larger index). k stays the original terminal count.
    const double dup_threshold = diameter / (static_cast<double>(k) * k);
    std::vector<char> alive(static_cast<std::size_t>(k), 1);
    bool changed = true;
    while (changed) {
        changed = false;
        for (int i = 0; i < k && !changed; ++i) {
            if (!alive[static_cast<std::size_t>(i)]) continue;
            for (int j = i + 1; j < k && !changed; ++j) {
                if (!alive[static_cast<std::size_t>(j)]) continue;
                if (terminal_metric.weight(i, j) <= dup_threshold) {
                    alive[static_cast<std::size_t>(j)] = 0;
                    changed = true;
                }
            }
        }
    }

    double min_dist = std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i) {
        if (!alive[static_cast<std::size_t>(i)]) continue;
        for (int j = i + 1; j < k; ++j) {
            if (!alive[static_cast<std::size_t>(j)]) continue;
            min_dist = std::min(min_dist, terminal_metric.weight(i, j));
        }
    }

    for (int i = 0; i < k; ++i) {
        if (alive[static_cast<std::size_t>(i)])
            out.kept.push_back(i);
        else
            out.removed.push_back(original_ids[static_cast<std::size_t>(i)]);
    }
    if (out.kept.size() <= 1) {
        out.degenerate = true;
        return out;
    }

    out.scale = min_dist;
    const int kk = static_cast<int>(out.kept.size());
    std::vector<Weight> w(static_cast<std::size_t>(kk) * kk, 0.0);
    for (int i = 0; i < kk; ++i)
        for (int j = 0; j < kk; ++j)
            w[static_cast<std::size_t>(i) * kk + j] =
                terminal_metric.weight(out.kept[static_cast<std::size_t>(i)],
                                       out.kept[static_cast<std::size_t>(j)]) /
                min_dist;
    std::vector<PointId> terms(static_cast<std::size_t>(kk));
    for (int i = 0; i < kk; ++i) terms[static_cast<std::size_t>(i)] = i;
    out.scaled_terminal_metric = MetricInstance::from_weights(kk, std::move(terms), std::move(w));
    return out;
}

Preprocessed preprocess_and_scale(CountingOracle& oracle) {
    MetricInstance tm = induced_terminal_metric(oracle);
    return preprocess_and_scale(tm, oracle.instance().terminals());
}

LaminarHierarchy LaminarHierarchy::build(const MetricInstance& scaled_terminal_metric, double eps,
                                         int ambient_n) {
    if (eps <= 0.0 || eps >= 1.0) throw std::invalid_argument("eps must lie in (0,1)");
    for (int i = 0; i < scaled_terminal_metric.n(); ++i)
        for (int j = i + 1; j < scaled_terminal_metric.n(); ++j)
            if (scaled_terminal_metric.weight(i, j) < 1.0 - 1e-9)
                throw std::invalid_argument("hierarchy needs a scaled terminal metric");
    LaminarHierarchy h;
    h.metric_ = scaled_terminal_metric;
    h.eps_ = eps;
    h.ambient_n_ = ambient_n;
    const int k = h.metric_.n();
    h.level_cap_ = std::ceil(std::log(std::max(2.0, static_cast<double>(k) * k)) / std::log1p(eps));

    h.tau_star_ = terminal_mst_of(h.metric_);
    for (const auto& e : h.tau_star_.tree.edges)
        h.level_weights_[weight_level(e.w, eps)] += e.w;

    // Singleton sets: S_0 = S_1 = {{t}} since no terminal edge is at level 0
    // after scaling.
    h.nodes_.reserve(static_cast<std::size_t>(2 * k));
    h.leaf_of_terminal_.resize(static_cast<std::size_t>(k));
    for (int t = 0; t < k; ++t) {
        HierarchyNode node;
        node.id = t;
        node.level_created = 0;
        node.level_absorbed = 0;  // patched on merge; root handled at the end
        node.members = {t};
        h.nodes_.push_back(std::move(node));
        h.leaf_of_terminal_[static_cast<std::size_t>(t)] = t;
    }

    struct LevelEdge {
        int level;
        int a, b;
    };
    std::vector<LevelEdge> edges;
    edges.reserve(static_cast<std::size_t>(k) * (k - 1) / 2);
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
            edges.push_back({weight_level(h.metric_.weight(i, j), eps), i, j});
    std::sort(edges.begin(), edges.end(), [](const LevelEdge& x, const LevelEdge& y) {
        if (x.level != y.level) return x.level < y.level;
        if (x.a != y.a) return x.a < y.a;
        return x.b < y.b;
    });

    std::vector<int> parent(static_cast<std::size_t>(k));
    std::vector<int> comp_node(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        parent[static_cast<std::size_t>(i)] = i;
        comp_node[static_cast<std::size_t>(i)] = i;
    }
    auto find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x)
            x = parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
        return x;
    };

    std::size_t pos = 0;
    while (pos < edges.size()) {
        const int level = edges[pos].level;
        std::vector<int> touched;
        for (; pos < edges.size() && edges[pos].level == level; ++pos) {
            const int ra = find(edges[pos].a);
            const int rb = find(edges[pos].b);
            if (ra == rb) continue;
            parent[static_cast<std::size_t>(ra)] = rb;
            touched.push_back(rb);
            touched.push_back(ra);
        }
        // An edge at level `level` first merges components in H_level, so the
        // merged sets enter the partition at S_{level+1}.
        std::vector<int> roots;
        for (int x : touched) {
            const int r = find(x);
            if (std::find(roots.begin(), roots.end(), r) == roots.end()) roots.push_back(r);
        }
        std::sort(roots.begin(), roots.end());
        for (int r : roots) {
            // Gather the old nodes that now share root r.
            std::vector<int> child_nodes;
            for (int x : touched)
                if (find(x) == r) {
                    const int node = comp_node[static_cast<std::size_t>(x)];
                    if (std::find(child_nodes.begin(), child_nodes.end(), node) == child_nodes.end())
                        child_nodes.push_back(node);
                }
            if (child_nodes.size() < 2) continue;
            std::sort(child_nodes.begin(), child_nodes.end());
            HierarchyNode node;
            node.id = static_cast<int>(h.nodes_.size());
            node.level_created = level + 1;
            node.children = child_nodes;
            for (int c : child_nodes) {
                h.nodes_[static_cast<std::size_t>(c)].parent = node.id;
                h.nodes_[static_cast<std::size_t>(c)].level_absorbed = level + 1;
                node.members.insert(node.members.end(),
                                    h.nodes_[static_cast<std::size_t>(c)].members.begin(),
                                    h.nodes_[static_cast<std::size_t>(c)].members.end());
            }
            std::sort(node.members.begin(), node.members.end());
            comp_node[static_cast<std::size_t>(r)] = node.id;
            h.nodes_.push_back(std::move(node));
        }
    }

    h.root_ = comp_node[static_cast<std::size_t>(find(0))];
    h.nodes_[static_cast<std::size_t>(h.root_)].level_absorbed =
        static_cast<int>(h.level_cap_) + 1;
    return h;
}

bool LaminarHierarchy::is_heavy(int level) const {
    auto it = level_weights_.find(level);
    if (it == level_weights_.end()) return false;
    return it->second >= heavy_threshold();
}

double LaminarHierarchy::heavy_threshold() const {
    const double log_n = std::log(std::max(2.0, static_cast<double>(ambient_n_)));
    return mst_cost() / (std::max(1.0, level_cap_) * log_n);
}

std::vector<int> LaminarHierarchy::sets_at_level(int level) const {
    std::vector<int> out;
    for (const HierarchyNode& node : nodes_)
        if (node.level_created <= level && level < node.level_absorbed) out.push_back(node.id);
    return out;
}

int LaminarHierarchy::node_of_terminal(int terminal_index, int level) const {
    int cur = leaf_of_terminal_[static_cast<std::size_t>(terminal_index)];
    while (!(nodes_[static_cast<std::size_t>(cur)].level_created <= level &&
             level < nodes_[static_cast<std::size_t>(cur)].level_absorbed)) {
        cur = nodes_[static_cast<std::size_t>(cur)].parent;
        if (cur < 0) throw std::logic_error("terminal has no set at the requested level");
    }
    return cur;
}

std::vector<int> LaminarHierarchy::representatives(int node_id, int level) const {
    const HierarchyNode& node = nodes_[static_cast<std::size_t>(node_id)];
    const double radius = eps_ * level_upper(level, eps_);
    std::vector<int> reps;
    for (int t : node.members) {
        bool separated = true;
        for (int r : reps)
            if (metric_.weight(t, r) < radius) {
                separated = false;
                break;
            }
        if (separated) reps.push_back(t);
    }
    return reps;
}

bool LaminarHierarchy::laminar_consistent() const {
    // Any two sets nest or are disjoint, each level is a partition, and every
    // level's partition refines the next one's.
    const int k = metric_.n();
    const int cap = static_cast<int>(level_cap_);
    std::vector<int> prev;
    for (int level = 0; level <= cap; ++level) {
        std::vector<int> owner(static_cast<std::size_t>(k), -1);
        for (int id : sets_at_level(level)) {
            for (int t : nodes_[static_cast<std::size_t>(id)].members) {
                if (owner[static_cast<std::size_t>(t)] != -1) return false;  // overlap
                owner[static_cast<std::size_t>(t)] = id;
            }
        }
        for (int t = 0; t < k; ++t)
            if (owner[static_cast<std::size_t>(t)] == -1) return false;  // not a partition
        if (level > 0) {
            // Refinement: terminals sharing a set at level-1 still share one.
            for (int i = 0; i < k; ++i)
                for (int j = i + 1; j < k; ++j) {
                    const bool together_before =
                        prev[static_cast<std::size_t>(i)] == prev[static_cast<std::size_t>(j)];
                    const bool together_now =
                        owner[static_cast<std::size_t>(i)] == owner[static_cast<std::size_t>(j)];
                    if (together_before && !together_now) return false;
                }
        }
        prev = owner;
    }
    // The top level is the single set T.
    return sets_at_level(cap).size() == 1;
}

}  // namespace stq
