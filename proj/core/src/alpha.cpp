#include "stq/alpha.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <stdexcept>
#include <unordered_map>

#include "stq/hashing.hpp"

namespace stq {

namespace {

TerminalMst mst_over(CountingOracle& oracle, const std::vector<PointId>& ids) {
    // Kruskal over an id subset, lexicographic ties, queries through the oracle.
    struct E {
        double w;
        PointId u, v;
    };
    std::vector<E> edges;
    const int m = static_cast<int>(ids.size());
    edges.reserve(static_cast<std::size_t>(m) * (m - 1) / 2);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            PointId a = ids[static_cast<std::size_t>(i)], b = ids[static_cast<std::size_t>(j)];
            if (a > b) std::swap(a, b);
            edges.push_back({oracle.query(a, b), a, b});
        }
    std::sort(edges.begin(), edges.end(), [](const E& x, const E& y) {
        if (x.w != y.w) return x.w < y.w;
        if (x.u != y.u) return x.u < y.u;
        return x.v < y.v;
    });
    std::unordered_map<PointId, PointId> parent;
    for (PointId v : ids) parent[v] = v;
    std::function<PointId(PointId)> find = [&](PointId x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    TerminalMst out;
    for (const E& e : edges) {
        const PointId ru = find(e.u), rv = find(e.v);
        if (ru == rv) continue;
        parent[ru] = rv;
        out.tree.edges.push_back({e.u, e.v, e.w});
        out.cost += e.w;
    }
    out.tree.cost = out.cost;
    return out;
}

}  // namespace

AlphaRun approx_steiner_alpha(CountingOracle& oracle, double alpha, std::uint64_t seed,
                              const AlphaOptions& options) {
    if (alpha < 2.0) throw std::invalid_argument("alpha must be at least 2");
    const MetricInstance& instance = oracle.instance();
    const int k = instance.k();
    const int n = instance.n();
    const double log_n = std::log(std::max(2.0, static_cast<double>(n)));

    AlphaRun run;
    run.alpha = alpha;
    run.beta = alpha / (100.0 * log_n);

    const double fallback_at = options.fallback_threshold >= 0.0 ? options.fallback_threshold
                                                                 : log_n * log_n;
    const std::uint64_t count_before = oracle.count();

    int core_size = k;
    if (!options.disable_fallback && alpha < fallback_at) {
        run.fallback = true;
    } else {
        core_size = static_cast<int>(
            std::clamp(std::ceil(static_cast<double>(k) / run.beta), 1.0, static_cast<double>(k)));
    }

    const std::vector<PointId>& terms = instance.terminals();
    if (core_size >= k) {
        run.core = terms;
    } else {
        std::vector<PointId> pool = terms;
        auto rng = make_rng(derive_seed(seed, 0xa1fa));
        std::shuffle(pool.begin(), pool.end(), rng);
        pool.resize(static_cast<std::size_t>(core_size));
        std::sort(pool.begin(), pool.end());
        run.core = std::move(pool);
    }

    TerminalMst core_mst = mst_over(oracle, run.core);
    run.tree = core_mst.tree;
    run.tree.cost = core_mst.cost;

    std::vector<char> in_core(static_cast<std::size_t>(instance.n()), 0);
    for (PointId c : run.core) in_core[static_cast<std::size_t>(c)] = 1;
    for (PointId u : terms) {
        if (in_core[static_cast<std::size_t>(u)]) continue;
        PointId best = run.core.front();
        double best_w = oracle.query(u, best);
        for (std::size_t i = 1; i < run.core.size(); ++i) {
            const double w = oracle.query(u, run.core[i]);
            if (w < best_w) {  // ties keep the smallest core id
                best_w = w;
                best = run.core[i];
            }
        }
        run.attach[u] = best;
        run.tree.edges.push_back({u, best, best_w});
        run.tree.cost += best_w;
    }

    run.queries = oracle.count() - count_before;
    const std::uint64_t budget =
        static_cast<std::uint64_t>(k) * static_cast<std::uint64_t>(run.core.size());
    if (run.queries > budget) throw std::logic_error("query bound k*|T'| exceeded");
    return run;
}

EulerWindowReport euler_window_check(const AlphaRun& run, const TerminalMst& tau_star,
                                     const MetricInstance& instance) {
    EulerWindowReport report;
    const double log_n = std::log(std::max(2.0, static_cast<double>(instance.n())));
    report.window_length = 20.0 * run.beta * log_n;
    report.bound = report.window_length * tau_star.cost;

    // Euler tour of tau*: DFS visiting each edge twice.
    std::unordered_map<PointId, std::vector<PointId>> adj;
    for (const auto& e : tau_star.tree.edges) {
        adj[e.u].push_back(e.v);
        adj[e.v].push_back(e.u);
    }
    std::vector<PointId> tour;
    if (!tau_star.tree.edges.empty()) {
        const PointId root = tau_star.tree.edges.front().u;
        std::function<void(PointId, PointId)> dfs = [&](PointId u, PointId from) {
            tour.push_back(u);
            for (PointId v : adj[u]) {
                if (v == from) continue;
                dfs(v, u);
                tour.push_back(u);
            }
        };
        dfs(root, -1);
    }

    std::vector<char> in_core(static_cast<std::size_t>(instance.n()), 0);
    for (PointId c : run.core) in_core[static_cast<std::size_t>(c)] = 1;

    const int window = std::max(1, static_cast<int>(std::floor(report.window_length)));
    const int len = static_cast<int>(tour.size());
    for (int t = 0; t + window < len; ++t) {
        bool hit = false;
        for (int i = t; i <= t + window; ++i)
            if (in_core[static_cast<std::size_t>(tour[static_cast<std::size_t>(i)])]) {
                hit = true;
                break;
            }
        ++report.windows_checked;
        if (!hit) {
            report.xi_occurred = true;
            break;
        }
    }
    if (len > 0 && window >= len) {
        // The tour fits inside one window; the core is nonempty so it is hit.
        report.windows_checked = std::max(report.windows_checked, 1);
    }

    for (const auto& [u, f] : run.attach) report.attach_sum += instance.weight(u, f);
    if (!report.xi_occurred) report.bound_holds = report.attach_sum <= report.bound + 1e-9;
    return report;
}

}  // namespace stq
