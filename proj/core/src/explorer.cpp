#include "stq/explorer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "stq/hashing.hpp"
#include "stq/hierarchy.hpp"

namespace stq {

ComponentExplorer::ComponentExplorer(CountingOracle& oracle, std::vector<PointId> terminals,
                                     double scale, int level, double eps, double eps1,
                                     double round_budget, std::uint64_t seed)
    : oracle_(&oracle),
      terminals_(std::move(terminals)),
      scale_(scale),
      level_(level),
      round_budget_(round_budget) {
    if (scale_ <= 0.0) throw std::invalid_argument("scale must be positive");
    const double base = std::pow(1.0 + eps, level);
    radius_ = eps1 * base;
    link_radius_ = (1.0 + 3.0 * eps1) * base;

    const int k = static_cast<int>(terminals_.size());
    index_.reserve(terminals_.size());
    rank_.resize(terminals_.size());
    for (int i = 0; i < k; ++i) {
        index_[terminals_[static_cast<std::size_t>(i)]] = i;
        rank_[static_cast<std::size_t>(i)] =
            hash_combine(seed, static_cast<std::uint64_t>(terminals_[static_cast<std::size_t>(i)]));
    }
    mark_.assign(terminals_.size(), Mark::Unknown);
    assigned_.assign(terminals_.size(), -1);
    in_big_.assign(terminals_.size(), 0);
}

int ComponentExplorer::index_of(PointId u) const {
    auto it = index_.find(u);
    if (it == index_.end()) throw std::invalid_argument("not a terminal of this explorer");
    return it->second;
}

double ComponentExplorer::dist(PointId u, PointId v) { return oracle_->query(u, v) / scale_; }

int ComponentExplorer::comp_root(int c) {
    while (comp_parent_[static_cast<std::size_t>(c)] != c)
        c = comp_parent_[static_cast<std::size_t>(c)] =
            comp_parent_[static_cast<std::size_t>(comp_parent_[static_cast<std::size_t>(c)])];
    return c;
}

void ComponentExplorer::merge_comps(int a, int b) {
    a = comp_root(a);
    b = comp_root(b);
    if (a == b) return;
    comp_parent_[static_cast<std::size_t>(a)] = b;
    comp_reps_[static_cast<std::size_t>(b)].insert(comp_reps_[static_cast<std::size_t>(b)].end(),
                                                   comp_reps_[static_cast<std::size_t>(a)].begin(),
                                                   comp_reps_[static_cast<std::size_t>(a)].end());
    comp_reps_[static_cast<std::size_t>(a)].clear();
    comp_terminals_[static_cast<std::size_t>(b)] += comp_terminals_[static_cast<std::size_t>(a)];
    comp_terminals_[static_cast<std::size_t>(a)] = 0;
}

ComponentExplorer::Mark ComponentExplorer::mark(PointId u) const {
    return mark_[static_cast<std::size_t>(index_of(u))];
}

std::uint64_t ComponentExplorer::rank(PointId u) const {
    return rank_[static_cast<std::size_t>(index_of(u))];
}

PointId ComponentExplorer::find_representative(PointId u) {
    int cur = index_of(u);
    const int k = static_cast<int>(terminals_.size());
    while (true) {
        if (mark_[static_cast<std::size_t>(cur)] == Mark::Representative)
            return terminals_[static_cast<std::size_t>(cur)];

        // Query cur against all terminals; a higher-ranked in-radius terminal
        // not yet ruled out blocks cur from the independent set.
        int best_blocker = -1;
        std::vector<int> ball;
        for (int t = 0; t < k; ++t) {
            if (t == cur) continue;
            const double d = dist(terminals_[static_cast<std::size_t>(cur)],
                                  terminals_[static_cast<std::size_t>(t)]);
            if (d > radius_) continue;
            ball.push_back(t);
            if (rank_[static_cast<std::size_t>(t)] > rank_[static_cast<std::size_t>(cur)] &&
                mark_[static_cast<std::size_t>(t)] != Mark::NonRepresentative) {
                if (best_blocker == -1 ||
                    rank_[static_cast<std::size_t>(t)] > rank_[static_cast<std::size_t>(best_blocker)])
                    best_blocker = t;
            }
        }
        if (best_blocker != -1) {
            cur = best_blocker;
            continue;
        }

        // cur joins the independent set; its radius ball is dominated.
        mark_[static_cast<std::size_t>(cur)] = Mark::Representative;
        const int comp = static_cast<int>(comp_parent_.size());
        comp_parent_.push_back(comp);
        comp_reps_.push_back({cur});
        comp_terminals_.push_back(1);
        assigned_[static_cast<std::size_t>(cur)] = comp;
        for (int t : ball) {
            if (mark_[static_cast<std::size_t>(t)] == Mark::Unknown)
                mark_[static_cast<std::size_t>(t)] = Mark::NonRepresentative;
            if (assigned_[static_cast<std::size_t>(t)] < 0) {
                assigned_[static_cast<std::size_t>(t)] = comp;
                ++comp_terminals_[static_cast<std::size_t>(comp)];
            }
        }
        // Link against previously known representatives.
        for (int t = 0; t < k; ++t) {
            if (t == cur || mark_[static_cast<std::size_t>(t)] != Mark::Representative) continue;
            if (dist(terminals_[static_cast<std::size_t>(cur)],
                     terminals_[static_cast<std::size_t>(t)]) <= link_radius_)
                merge_comps(comp, assigned_[static_cast<std::size_t>(t)]);
        }
        return terminals_[static_cast<std::size_t>(cur)];
    }
}

void ComponentExplorer::record_region(const std::vector<int>& comps, bool small) {
    Region region;
    region.small = small;
    for (int c : comps) {
        const int root = comp_root(c);
        if (std::find(region.comps.begin(), region.comps.end(), root) == region.comps.end()) {
            region.comps.push_back(root);
            region.total_reps += static_cast<int>(comp_reps_[static_cast<std::size_t>(root)].size());
        }
    }
    const int id = static_cast<int>(regions_.size());
    regions_.push_back(region);
    for (int root : region.comps) region_of_[root] = id;
}

ComponentExplorer::ComponentInfo ComponentExplorer::bfs_component(PointId u) {
    const int k = static_cast<int>(terminals_.size());
    const int ui = index_of(u);

    auto result_from_region = [&](int comp) {
        const int root = comp_root(comp);
        const Region& region = regions_[static_cast<std::size_t>(region_of_.at(root))];
        ComponentInfo info;
        info.small = region.small;
        info.component = root;
        info.region_rep_count = region.total_reps;
        info.terminal_count = comp_terminals_[static_cast<std::size_t>(root)];
        for (int r : comp_reps_[static_cast<std::size_t>(root)])
            info.reps.push_back(terminals_[static_cast<std::size_t>(r)]);
        return info;
    };

    if (in_big_[static_cast<std::size_t>(ui)]) {
        ComponentInfo info;
        info.small = false;
        return info;
    }
    if (assigned_[static_cast<std::size_t>(ui)] >= 0) {
        const int root = comp_root(assigned_[static_cast<std::size_t>(ui)]);
        auto it = region_of_.find(root);
        if (it != region_of_.end()) return result_from_region(root);
    }

    // Fresh exploration: rounds pick the highest-ranked active terminal,
    // resolve its representative, and scan outward.
    std::vector<char> active(terminals_.size(), 0), done(terminals_.size(), 0);
    std::vector<int> touched;
    active[static_cast<std::size_t>(ui)] = 1;
    touched.push_back(ui);
    std::vector<int> region_comps;
    int start_rep = -1;  // FIND's output shares the start terminal's component
    double rounds = 0.0;
    bool completed = true;

    while (true) {
        int cur = -1;
        for (int t = 0; t < k; ++t)
            if (active[static_cast<std::size_t>(t)] &&
                (cur == -1 || rank_[static_cast<std::size_t>(t)] > rank_[static_cast<std::size_t>(cur)]))
                cur = t;
        if (cur == -1) break;
        if (++rounds > round_budget_) {
            completed = false;
            break;
        }
        active[static_cast<std::size_t>(cur)] = 0;
        done[static_cast<std::size_t>(cur)] = 1;

        const PointId rep = find_representative(terminals_[static_cast<std::size_t>(cur)]);
        const int rep_idx = index_of(rep);
        if (start_rep == -1 && cur == ui) start_rep = rep_idx;
        const int comp = comp_root(assigned_[static_cast<std::size_t>(rep_idx)]);
        if (std::find(region_comps.begin(), region_comps.end(), comp) == region_comps.end())
            region_comps.push_back(comp);

        for (int t = 0; t < k; ++t) {
            if (t == rep_idx || done[static_cast<std::size_t>(t)] ||
                active[static_cast<std::size_t>(t)])
                continue;
            const double d =
                dist(rep, terminals_[static_cast<std::size_t>(t)]);
            if (d < radius_) {
                done[static_cast<std::size_t>(t)] = 1;  // represented by rep
                touched.push_back(t);
            } else if (d <= link_radius_) {
                active[static_cast<std::size_t>(t)] = 1;
                touched.push_back(t);
            }
        }
    }

    if (!completed) {
        for (int t : touched) in_big_[static_cast<std::size_t>(t)] = 1;
        for (int c : region_comps)
            for (int r : comp_reps_[static_cast<std::size_t>(comp_root(c))])
                in_big_[static_cast<std::size_t>(r)] = 1;
        ComponentInfo info;
        info.small = false;
        return info;
    }

    record_region(region_comps, true);
    int comp;
    if (assigned_[static_cast<std::size_t>(ui)] >= 0) {
        comp = comp_root(assigned_[static_cast<std::size_t>(ui)]);
    } else if (start_rep >= 0) {
        comp = comp_root(assigned_[static_cast<std::size_t>(start_rep)]);
        assigned_[static_cast<std::size_t>(ui)] = comp;
        ++comp_terminals_[static_cast<std::size_t>(comp)];
    } else {
        comp = comp_root(region_comps.front());
    }
    return result_from_region(comp);
}

std::pair<std::vector<PointId>, bool> ComponentExplorer::enumerate_representatives(
    std::size_t cap) {
    const int k = static_cast<int>(terminals_.size());
    std::vector<int> order(terminals_.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [this](int a, int b) {
        return rank_[static_cast<std::size_t>(a)] > rank_[static_cast<std::size_t>(b)];
    });

    std::vector<PointId> reps;
    for (int i = 0; i < k; ++i) {
        const int t = order[static_cast<std::size_t>(i)];
        if (mark_[static_cast<std::size_t>(t)] == Mark::NonRepresentative) continue;
        if (mark_[static_cast<std::size_t>(t)] == Mark::Unknown)
            find_representative(terminals_[static_cast<std::size_t>(t)]);
        if (mark_[static_cast<std::size_t>(t)] == Mark::Representative) {
            reps.push_back(terminals_[static_cast<std::size_t>(t)]);
            if (reps.size() > cap) return {reps, false};
        }
    }
    return {reps, true};
}

}  // namespace stq
