#include "stq/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <unordered_map>

#include "stq/hierarchy.hpp"

namespace stq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Dsu {
    std::vector<int> parent;
    explicit Dsu(int n) : parent(n) {
        for (int i = 0; i < n; ++i) parent[i] = i;
    }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    bool merge(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[a] = b;
        return true;
    }
};

struct RankedEdge {
    double w;
    PointId u, v;  // u < v, original ids
    bool operator<(const RankedEdge& o) const {
        if (w != o.w) return w < o.w;
        if (u != o.u) return u < o.u;
        return v < o.v;
    }
};

TerminalMst kruskal(const std::vector<PointId>& ids,
                    const std::vector<std::vector<double>>& dist) {
    const int k = static_cast<int>(ids.size());
    TerminalMst out;
    if (k <= 1) return out;

    std::vector<RankedEdge> edges;
    edges.reserve(static_cast<std::size_t>(k) * (k - 1) / 2);
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
            PointId a = ids[static_cast<std::size_t>(i)], b = ids[static_cast<std::size_t>(j)];
            if (a > b) std::swap(a, b);
            edges.push_back({dist[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], a, b});
        }
    std::sort(edges.begin(), edges.end());

    std::unordered_map<PointId, int> index;
    index.reserve(ids.size());
    for (int i = 0; i < k; ++i) index[ids[static_cast<std::size_t>(i)]] = i;

    Dsu dsu(k);
    for (const RankedEdge& e : edges) {
        if (dsu.merge(index[e.u], index[e.v])) {
            out.tree.edges.push_back({e.u, e.v, e.w});
            out.cost += e.w;
            if (static_cast<int>(out.tree.edges.size()) == k - 1) break;
        }
    }
    out.tree.cost = out.cost;
    return out;
}

/// Prim over an id subset of an explicit instance. O(m^2).
double prim_cost(const MetricInstance& instance, const std::vector<PointId>& ids,
                 std::vector<SteinerTree::Edge>* edges_out = nullptr) {
    const int m = static_cast<int>(ids.size());
    if (m <= 1) return 0.0;
    std::vector<double> best(static_cast<std::size_t>(m), kInf);
    std::vector<int> from(static_cast<std::size_t>(m), -1);
    std::vector<char> used(static_cast<std::size_t>(m), 0);
    best[0] = 0.0;
    double total = 0.0;
    for (int it = 0; it < m; ++it) {
        int pick = -1;
        for (int i = 0; i < m; ++i)
            if (!used[static_cast<std::size_t>(i)] &&
                (pick == -1 || best[static_cast<std::size_t>(i)] < best[static_cast<std::size_t>(pick)]))
                pick = i;
        used[static_cast<std::size_t>(pick)] = 1;
        total += best[static_cast<std::size_t>(pick)];
        if (edges_out && from[static_cast<std::size_t>(pick)] >= 0)
            edges_out->push_back({ids[static_cast<std::size_t>(from[static_cast<std::size_t>(pick)])],
                                  ids[static_cast<std::size_t>(pick)],
                                  best[static_cast<std::size_t>(pick)]});
        for (int i = 0; i < m; ++i) {
            if (used[static_cast<std::size_t>(i)]) continue;
            const double w =
                instance.weight(ids[static_cast<std::size_t>(pick)], ids[static_cast<std::size_t>(i)]);
            if (w < best[static_cast<std::size_t>(i)]) {
                best[static_cast<std::size_t>(i)] = w;
                from[static_cast<std::size_t>(i)] = pick;
            }
        }
    }
    return total;
}

void prune_steiner_leaves(SteinerTree& tree, const MetricInstance& instance) {
    bool changed = true;
    while (changed) {
        changed = false;
        std::unordered_map<PointId, int> degree;
        for (const auto& e : tree.edges) {
            ++degree[e.u];
            ++degree[e.v];
        }
        std::vector<SteinerTree::Edge> kept;
        kept.reserve(tree.edges.size());
        for (const auto& e : tree.edges) {
            const bool drop_u = degree[e.u] == 1 && !instance.is_terminal(e.u);
            const bool drop_v = degree[e.v] == 1 && !instance.is_terminal(e.v);
            if (drop_u || drop_v) {
                tree.cost -= e.w;
                changed = true;
            } else {
                kept.push_back(e);
            }
        }
        tree.edges.swap(kept);
    }
}

SteinerTree exact_subset_enum(const MetricInstance& instance) {
    const std::vector<PointId> steiner = instance.steiner_points();
    const int s = static_cast<int>(steiner.size());
    if (s > 20) throw std::invalid_argument("subset_enum requires n-k <= 20");

    const std::vector<PointId>& terms = instance.terminals();
    double best = kInf;
    std::uint32_t best_mask = 0;
    std::vector<PointId> ids;
    for (std::uint32_t mask = 0; mask < (1u << s); ++mask) {
        ids.assign(terms.begin(), terms.end());
        for (int i = 0; i < s; ++i)
            if (mask & (1u << i)) ids.push_back(steiner[static_cast<std::size_t>(i)]);
        const double cost = prim_cost(instance, ids);
        if (cost < best - 1e-12) {
            best = cost;
            best_mask = mask;
        }
    }

    ids.assign(terms.begin(), terms.end());
    for (int i = 0; i < s; ++i)
        if (best_mask & (1u << i)) ids.push_back(steiner[static_cast<std::size_t>(i)]);
    SteinerTree tree;
    tree.cost = prim_cost(instance, ids, &tree.edges);
    prune_steiner_leaves(tree, instance);
    return tree;
}

SteinerTree exact_dreyfus_wagner(const MetricInstance& instance) {
    const int k = instance.k();
    if (k > 14) throw std::invalid_argument("dreyfus_wagner requires k <= 14");
    const int n = instance.n();
    const std::vector<PointId>& terms = instance.terminals();

    if (k == 1) return SteinerTree{};

    const std::uint32_t full = (1u << k) - 1;
    // dp[mask][v]: optimal cost of a tree spanning the terminals in mask plus v.
    std::vector<std::vector<double>> dp(full + 1, std::vector<double>(static_cast<std::size_t>(n), kInf));
    // Reconstruction state: for each (mask, v) the relax source, and for each
    // (mask, u) the chosen submask split (0 for singleton masks).
    std::vector<std::vector<int>> src(full + 1, std::vector<int>(static_cast<std::size_t>(n), -1));
    std::vector<std::vector<std::uint32_t>> split(full + 1,
                                                  std::vector<std::uint32_t>(static_cast<std::size_t>(n), 0));

    for (int i = 0; i < k; ++i)
        for (int v = 0; v < n; ++v)
            dp[1u << i][static_cast<std::size_t>(v)] =
                v == terms[static_cast<std::size_t>(i)]
                    ? 0.0
                    : instance.weight(terms[static_cast<std::size_t>(i)], v);

    std::vector<double> merged(static_cast<std::size_t>(n));
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
        if ((mask & (mask - 1)) == 0) continue;  // singleton handled above
        const std::uint32_t low = mask & (~mask + 1);
        for (int v = 0; v < n; ++v) {
            merged[static_cast<std::size_t>(v)] = kInf;
            for (std::uint32_t sub = (mask - 1) & mask; sub > 0; sub = (sub - 1) & mask) {
                if (!(sub & low)) continue;  // canonical split: keep the low bit on one side
                const double c = dp[sub][static_cast<std::size_t>(v)] +
                                 dp[mask ^ sub][static_cast<std::size_t>(v)];
                if (c < merged[static_cast<std::size_t>(v)] - 1e-15) {
                    merged[static_cast<std::size_t>(v)] = c;
                    split[mask][static_cast<std::size_t>(v)] = sub;
                }
            }
        }
        // In a metric one relaxation step reaches the optimum: any multi-hop
        // connection costs at least the direct edge.
        for (int v = 0; v < n; ++v) {
            for (int u = 0; u < n; ++u) {
                const double c = merged[static_cast<std::size_t>(u)] +
                                 (u == v ? 0.0 : instance.weight(u, v));
                if (c < dp[mask][static_cast<std::size_t>(v)] - 1e-15) {
                    dp[mask][static_cast<std::size_t>(v)] = c;
                    src[mask][static_cast<std::size_t>(v)] = u;
                }
            }
        }
    }

    // Gather the vertex set of one optimal solution, then rebuild it as an MST
    // over those vertices (which matches the optimal cost and is surely a tree).
    std::vector<char> in_solution(static_cast<std::size_t>(n), 0);
    std::vector<std::pair<std::uint32_t, int>> work{{full, terms[0]}};
    while (!work.empty()) {
        auto [mask, v] = work.back();
        work.pop_back();
        in_solution[static_cast<std::size_t>(v)] = 1;
        if ((mask & (mask - 1)) == 0) {
            const int i = __builtin_ctz(mask);
            in_solution[static_cast<std::size_t>(terms[static_cast<std::size_t>(i)])] = 1;
            continue;
        }
        const int u = src[mask][static_cast<std::size_t>(v)];
        in_solution[static_cast<std::size_t>(u)] = 1;
        const std::uint32_t sub = split[mask][static_cast<std::size_t>(u)];
        work.push_back({sub, u});
        work.push_back({mask ^ sub, u});
    }
    std::vector<PointId> ids;
    for (int v = 0; v < n; ++v)
        if (in_solution[static_cast<std::size_t>(v)]) ids.push_back(v);

    SteinerTree tree;
    tree.cost = prim_cost(instance, ids, &tree.edges);
    prune_steiner_leaves(tree, instance);
    return tree;
}

}  // namespace

std::map<int, double> TerminalMst::per_level_weight(double eps) const {
    std::map<int, double> hist;
    for (const auto& e : tree.edges) hist[weight_level(e.w, eps)] += e.w;
    return hist;
}

TerminalMst terminal_mst(CountingOracle& oracle) {
    const std::vector<PointId>& terms = oracle.instance().terminals();
    const int k = static_cast<int>(terms.size());
    std::vector<std::vector<double>> dist(static_cast<std::size_t>(k),
                                          std::vector<double>(static_cast<std::size_t>(k), 0.0));
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
            dist[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                dist[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] =
                    oracle.query(terms[static_cast<std::size_t>(i)], terms[static_cast<std::size_t>(j)]);
    return kruskal(terms, dist);
}

TerminalMst terminal_mst_of(const MetricInstance& terminal_metric) {
    const std::vector<PointId>& terms = terminal_metric.terminals();
    const int k = static_cast<int>(terms.size());
    std::vector<std::vector<double>> dist(static_cast<std::size_t>(k),
                                          std::vector<double>(static_cast<std::size_t>(k), 0.0));
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            dist[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                terminal_metric.weight(terms[static_cast<std::size_t>(i)],
                                       terms[static_cast<std::size_t>(j)]);
    return kruskal(terms, dist);
}

SteinerTree exact_steiner(const MetricInstance& instance, ExactMethod method) {
    switch (method) {
        case ExactMethod::SubsetEnum:
            return exact_subset_enum(instance);
        case ExactMethod::DreyfusWagner:
            return exact_dreyfus_wagner(instance);
    }
    throw std::logic_error("unreachable");
}

namespace {

/// Mutable tree used by the star-improvement greedy.
struct WorkTree {
    std::unordered_map<PointId, std::vector<std::pair<PointId, double>>> adj;

    void add_edge(PointId u, PointId v, double w) {
        adj[u].push_back({v, w});
        adj[v].push_back({u, w});
    }
    void remove_edge(PointId u, PointId v) {
        auto strip = [](std::vector<std::pair<PointId, double>>& list, PointId target) {
            for (std::size_t i = 0; i < list.size(); ++i)
                if (list[i].first == target) {
                    list[i] = list.back();
                    list.pop_back();
                    return;
                }
        };
        strip(adj[u], v);
        strip(adj[v], u);
    }

    /// Maximum-weight edge on the tree path between a and b, skipping edges
    /// incident to `hub` (the star edges of the move being evaluated).
    bool path_max_edge(PointId a, PointId b, PointId hub, PointId* eu, PointId* ev,
                       double* ew) const {
        std::unordered_map<PointId, PointId> parent;
        parent[a] = a;
        std::queue<PointId> q;
        q.push(a);
        while (!q.empty() && !parent.count(b)) {
            const PointId u = q.front();
            q.pop();
            auto it = adj.find(u);
            if (it == adj.end()) continue;
            for (auto [v, w] : it->second) {
                if (!parent.count(v)) {
                    parent[v] = u;
                    q.push(v);
                }
            }
        }
        if (!parent.count(b)) return false;
        double best = -1.0;
        for (PointId cur = b; cur != a; cur = parent[cur]) {
            const PointId p = parent[cur];
            if (cur == hub || p == hub) continue;
            for (auto [v, w] : adj.at(cur))
                if (v == p && w > best) {
                    best = w;
                    *eu = cur;
                    *ev = p;
                }
        }
        if (best < 0.0) return false;
        *ew = best;
        return true;
    }
};

}  // namespace

SteinerTree good_tree_approx(CountingOracle& oracle) {
    const MetricInstance& instance = oracle.instance();
    const std::vector<PointId>& terms = instance.terminals();
    const int k = instance.k();

    TerminalMst mst = terminal_mst(oracle);
    if (k <= 2) return mst.tree;

    const std::vector<PointId> steiner = instance.steiner_points();
    std::unordered_map<PointId, std::vector<std::pair<double, PointId>>> near;
    near.reserve(steiner.size());
    for (PointId v : steiner) {
        auto& list = near[v];
        list.reserve(terms.size());
        for (PointId t : terms) list.push_back({oracle.query(v, t), t});
        std::sort(list.begin(), list.end());
        if (list.size() > 12) list.resize(12);
    }

    WorkTree tree;
    double cost = mst.cost;
    for (const auto& e : mst.tree.edges) tree.add_edge(e.u, e.v, e.w);
    std::unordered_map<PointId, char> used_hub;

    // First-improvement loop over candidate stars (hub; 2 or 3 nearby
    // terminals). Each accepted move strictly lowers the cost, so the loop
    // terminates.
    bool improved = true;
    while (improved) {
        improved = false;
        for (PointId v : steiner) {
            if (used_hub.count(v)) continue;
            const auto& cand = near[v];
            const int c = static_cast<int>(cand.size());
            for (int a = 0; a < c && !improved; ++a) {
                for (int b = a + 1; b < c && !improved; ++b) {
                    for (int z = b; z < c && !improved; ++z) {
                        std::vector<PointId> star{cand[static_cast<std::size_t>(a)].second,
                                                  cand[static_cast<std::size_t>(b)].second};
                        double star_cost = cand[static_cast<std::size_t>(a)].first +
                                           cand[static_cast<std::size_t>(b)].first;
                        if (z != b) {
                            star.push_back(cand[static_cast<std::size_t>(z)].second);
                            star_cost += cand[static_cast<std::size_t>(z)].first;
                        }

                        // Attach the star one leg at a time, breaking each cycle
                        // at its heaviest non-star edge; roll back if the move
                        // does not strictly pay off.
                        std::vector<std::pair<PointId, PointId>> removed;
                        std::vector<double> removed_w;
                        tree.add_edge(v, star[0], cand[static_cast<std::size_t>(a)].first);
                        bool ok = true;
                        for (std::size_t s = 1; s < star.size(); ++s) {
                            PointId eu, ev;
                            double ew;
                            if (!tree.path_max_edge(star[s], v, v, &eu, &ev, &ew)) {
                                ok = false;
                                break;
                            }
                            tree.remove_edge(eu, ev);
                            removed.push_back({eu, ev});
                            removed_w.push_back(ew);
                            double leg = 0.0;
                            for (const auto& [dw, t] : cand)
                                if (t == star[s]) {
                                    leg = dw;
                                    break;
                                }
                            tree.add_edge(v, star[s], leg);
                        }
                        double gain = -star_cost;
                        for (double w : removed_w) gain += w;
                        if (ok && gain > 1e-9) {
                            cost -= gain;
                            used_hub[v] = 1;
                            improved = true;
                        } else {
                            // Roll back in reverse order.
                            for (std::size_t s = star.size(); s-- > 1;) {
                                tree.remove_edge(v, star[s]);
                            }
                            for (std::size_t r = removed.size(); r-- > 0;) {
                                tree.add_edge(removed[r].first, removed[r].second, removed_w[r]);
                            }
                            tree.remove_edge(v, star[0]);
                        }
                    }
                }
            }
        }
    }

    SteinerTree out;
    out.cost = cost;
    for (const auto& [u, list] : tree.adj)
        for (auto [v, w] : list)
            if (u < v) out.edges.push_back({u, v, w});
    return out;
}

}  // namespace stq
