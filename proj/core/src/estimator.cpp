#include "stq/estimator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include "stq/hashing.hpp"
#include "stq/matching.hpp"

namespace stq {

double EstimatorConfig::level_cap(int k) const {
    return std::ceil(std::log(std::max(2.0, static_cast<double>(k) * k)) / std::log1p(eps));
}

double EstimatorConfig::small_cap(double levels, int n) const {
    const double log_n = std::log(std::max(2.0, static_cast<double>(n)));
    return small_set_factor * levels * log_n * log_n / eps;
}

double EstimatorConfig::metric_free_m(int n) const {
    if (mf_m_override > 0.0) return mf_m_override;
    const double base = std::pow(static_cast<double>(n), 6.0 / 7.0);
    const double log_n = std::log(std::max(2.0, static_cast<double>(n)));
    if (preset == Preset::Paper) return base * log_n * log_n;
    return std::max(4.0, base / 16.0);
}

double EstimatorConfig::rep_budget(double m, double levels, int n) const {
    if (mf_rep_budget_override > 0.0) return mf_rep_budget_override;
    const double log_n = std::log(std::max(2.0, static_cast<double>(n)));
    if (preset == Preset::Paper) return 2.0 * m * levels * log_n / eps1();
    return 4.0 * m;
}

double EstimatorConfig::bfs_round_budget(double levels, int n) const {
    if (mf_round_budget_override > 0.0) return mf_round_budget_override;
    const double log_n = std::log(std::max(2.0, static_cast<double>(n)));
    if (preset == Preset::Paper) return 100.0 * levels * log_n * log_n / eps1();
    return 64.0;
}

int EstimatorConfig::usize_samples(int k, double m) const {
    const double log_k = std::log(std::max(2.0, static_cast<double>(k)));
    const double want = preset == Preset::Paper ? 100.0 * k * log_k / m : 64.0;
    return static_cast<int>(std::clamp(std::ceil(want), 8.0,
                                       static_cast<double>(mf_usize_samples_cap)));
}

double EstimatorConfig::mf_r(int n) const {
    const double base = std::pow(static_cast<double>(n), 1.0 / 7.0);
    if (preset == Preset::Paper)
        return 50.0 * base * std::log(std::max(2.0, static_cast<double>(n))) / eps;
    return std::max(2.0, base);
}

double EstimatorConfig::mf_p(int n) const { return std::pow(static_cast<double>(n), 2.0 / 7.0); }

std::size_t EstimatorConfig::step3_samples(int n) const {
    const double formula =
        std::log(std::max(2.0, static_cast<double>(n))) / std::pow(eps, 10.0);
    const double capped = std::min(formula, static_cast<double>(step3_sample_cap));
    return static_cast<std::size_t>(std::max(1.0, capped));
}

EstimatorConfig EstimatorConfig::paper(std::uint64_t seed) {
    EstimatorConfig c;
    c.preset = Preset::Paper;
    c.seed = seed;
    return c;
}

EstimatorConfig EstimatorConfig::demo(std::uint64_t seed) {
    EstimatorConfig c;
    c.preset = Preset::Demo;
    c.eps0 = 0.01;
    c.eps = 0.1;
    c.step2_evidence_constant = 4.0;
    c.step3_evidence_constant = 1.0;
    c.step3_sample_cap = 64;
    c.seed = seed;
    c.mf_usize_samples_cap = 64;
    c.mf_matching_samples = 128;
    return c;
}

PipelineContext build_pipeline_context(CountingOracle& oracle, const EstimatorConfig& config) {
    PipelineContext ctx;
    MetricInstance tm = induced_terminal_metric(oracle);
    ctx.prep = preprocess_and_scale(tm, oracle.instance().terminals());
    if (ctx.prep.degenerate) return ctx;
    ctx.terminal_ids.reserve(ctx.prep.kept.size());
    for (int idx : ctx.prep.kept)
        ctx.terminal_ids.push_back(oracle.instance().terminals()[static_cast<std::size_t>(idx)]);
    ctx.hierarchy = LaminarHierarchy::build(ctx.prep.scaled_terminal_metric, config.eps,
                                            oracle.instance().n());
    return ctx;
}

namespace {

double geometric_sum(double ratio, int lo, int hi) {
    if (hi < lo) return 0.0;
    return (std::pow(ratio, hi + 1) - std::pow(ratio, lo)) / (ratio - 1.0);
}

/// Fixed-size Prim used by the advantage subroutine (at most 5 points).
double tiny_mst(const double w[5][5], int m) {
    double best[5];
    bool used[5] = {false, false, false, false, false};
    for (int i = 0; i < m; ++i) best[i] = w[0][i];
    used[0] = true;
    double total = 0.0;
    for (int step = 1; step < m; ++step) {
        int pick = -1;
        for (int i = 0; i < m; ++i)
            if (!used[i] && (pick == -1 || best[i] < best[pick])) pick = i;
        used[pick] = true;
        total += best[pick];
        for (int i = 0; i < m; ++i)
            if (!used[i] && w[pick][i] < best[i]) best[i] = w[pick][i];
    }
    return total;
}

double set_distance(const MetricInstance& metric, const std::vector<int>& a,
                    const std::vector<int>& b) {
    double best = std::numeric_limits<double>::infinity();
    for (int u : a)
        for (int v : b) best = std::min(best, metric.weight(u, v));
    return best;
}

struct AdvantageContext {
    CountingOracle* oracle;
    const MetricInstance* scaled_metric;
    const std::vector<PointId>* terminal_ids;
    double scale;
    std::size_t tuple_cap;
};

/// adv(S) at a level: the best cost reduction a single Steiner vertex offers
/// for reconnecting the four grandchild sets, maximized over representing
/// 4-subsets of the separated subset. Returns -inf when no tuple represents S.
double compute_advantage(const AdvantageContext& actx, const LaminarHierarchy& hierarchy,
                         int node_id, const std::vector<int>& reps, std::uint64_t seed) {
    const auto& nodes = hierarchy.nodes();
    const HierarchyNode& node = nodes[static_cast<std::size_t>(node_id)];
    if (node.children.size() != 2) return -std::numeric_limits<double>::infinity();
    const HierarchyNode& c1 = nodes[static_cast<std::size_t>(node.children[0])];
    const HierarchyNode& c2 = nodes[static_cast<std::size_t>(node.children[1])];
    if (c1.children.size() != 2 || c2.children.size() != 2)
        return -std::numeric_limits<double>::infinity();

    const std::vector<int>* grandchildren[4] = {
        &nodes[static_cast<std::size_t>(c1.children[0])].members,
        &nodes[static_cast<std::size_t>(c1.children[1])].members,
        &nodes[static_cast<std::size_t>(c2.children[0])].members,
        &nodes[static_cast<std::size_t>(c2.children[1])].members,
    };

    std::vector<int> group[4];
    for (int g = 0; g < 4; ++g)
        for (int t : reps)
            if (std::binary_search(grandchildren[g]->begin(), grandchildren[g]->end(), t))
                group[g].push_back(t);
    for (int g = 0; g < 4; ++g)
        if (group[g].empty()) return -std::numeric_limits<double>::infinity();

    const MetricInstance& tm = *actx.scaled_metric;
    const double wstar = set_distance(tm, *grandchildren[0], *grandchildren[1]) +
                         set_distance(tm, *grandchildren[2], *grandchildren[3]) +
                         set_distance(tm, c1.members, c2.members);

    // Pull the Steiner rows for every representative we may use.
    const std::vector<PointId> steiner = actx.oracle->instance().steiner_points();
    std::unordered_map<int, std::vector<double>> steiner_dist;
    for (int g = 0; g < 4; ++g)
        for (int t : group[g])
            if (!steiner_dist.count(t)) {
                std::vector<double> row;
                row.reserve(steiner.size());
                const PointId original = (*actx.terminal_ids)[static_cast<std::size_t>(t)];
                for (PointId v : steiner)
                    row.push_back(actx.oracle->query(original, v) / actx.scale);
                steiner_dist.emplace(t, std::move(row));
            }

    const std::size_t total_tuples = group[0].size() * group[1].size() * group[2].size() *
                                     group[3].size();
    std::vector<std::array<int, 4>> tuples;
    if (total_tuples <= actx.tuple_cap) {
        for (int a : group[0])
            for (int b : group[1])
                for (int c : group[2])
                    for (int d : group[3]) tuples.push_back({a, b, c, d});
    } else {
        auto rng = make_rng(derive_seed(seed, 0xadf0 + static_cast<std::uint64_t>(node_id)));
        for (std::size_t s = 0; s < actx.tuple_cap; ++s) {
            std::array<int, 4> t;
            for (int g = 0; g < 4; ++g) {
                std::uniform_int_distribution<std::size_t> pick(0, group[g].size() - 1);
                t[static_cast<std::size_t>(g)] = group[g][pick(rng)];
            }
            tuples.push_back(t);
        }
    }

    double best_adv = -std::numeric_limits<double>::infinity();
    double w[5][5];
    for (const auto& tuple : tuples) {
        for (int i = 0; i < 4; ++i) {
            w[i][i] = 0.0;
            for (int j = i + 1; j < 4; ++j)
                w[i][j] = w[j][i] = tm.weight(tuple[static_cast<std::size_t>(i)],
                                              tuple[static_cast<std::size_t>(j)]);
        }
        const double mst4 = tiny_mst(w, 4);
        double st = mst4;
        for (std::size_t v = 0; v < steiner.size(); ++v) {
            w[4][4] = 0.0;
            for (int i = 0; i < 4; ++i) {
                const double d =
                    steiner_dist.at(tuple[static_cast<std::size_t>(i)])[v];
                w[i][4] = w[4][i] = d;
            }
            st = std::min(st, tiny_mst(w, 5));
            if (wstar - st >= best_adv && st == 0.0) break;
        }
        best_adv = std::max(best_adv, wstar - st);
    }
    return best_adv;
}

}  // namespace

Step2Result step2_evidence(CountingOracle& oracle, const PipelineContext& ctx,
                           const EstimatorConfig& config, std::uint64_t seed) {
    Step2Result out;
    const LaminarHierarchy& h = ctx.hierarchy;
    out.threshold = config.step2_evidence_constant * config.eps0 * h.mst_cost();
    const int ambient_n = oracle.instance().n();
    const std::vector<PointId> steiner = oracle.instance().steiner_points();
    const double cap = config.small_cap(h.level_cap(), ambient_n);

    for (const auto& [level, weight] : h.level_weights()) {
        (void)weight;
        if (!h.is_heavy(level)) continue;

        // Ground set: the level's sets with a small separated subset.
        std::vector<int> universe_nodes;
        std::vector<std::vector<int>> reps;
        const std::vector<int> level_sets = h.sets_at_level(level);
        for (int id : level_sets) {
            std::vector<int> r = h.representatives(id, level);
            if (static_cast<double>(r.size()) <= cap) {
                universe_nodes.push_back(id);
                reps.push_back(std::move(r));
            }
        }
        if (universe_nodes.empty()) continue;

        const double radius = config.cover_fraction * level_upper(level, config.eps);
        const int num_real_sets = static_cast<int>(steiner.size());
        const int universe = static_cast<int>(universe_nodes.size());
        SetCoverView view(
            universe, num_real_sets + universe,
            [&, radius](int element, int set) {
                if (set >= num_real_sets) return set - num_real_sets == element;  // singleton
                const PointId v = steiner[static_cast<std::size_t>(set)];
                for (int t : reps[static_cast<std::size_t>(element)]) {
                    const PointId u = ctx.terminal_ids[static_cast<std::size_t>(t)];
                    if (oracle.query(u, v) / ctx.prep.scale <= radius) return true;
                }
                return false;
            });

        SetCoverEstimate est = alg_set_cover(view, config.eps, /*exclude_size_two=*/true,
                                             derive_seed(seed, 0x52c0 + level), config.setcover);
        Step2LevelReport report;
        report.level = level;
        report.universe_size = universe;
        report.level_set_count = static_cast<int>(level_sets.size());
        report.x = est.x;
        report.x_raw = est.x_raw;
        out.levels.push_back(report);
        out.statistic += level_upper(level, config.eps) * std::max(est.x_raw, 0.0);
    }
    out.evidence = out.statistic > out.threshold;
    return out;
}

Step3Result step3_advantage(CountingOracle& oracle, const PipelineContext& ctx,
                            const EstimatorConfig& config, std::uint64_t seed) {
    Step3Result out;
    const LaminarHierarchy& h = ctx.hierarchy;
    out.threshold = config.step3_evidence_constant * std::pow(config.eps, 0.75) * h.mst_cost();
    const int ambient_n = oracle.instance().n();
    const double cap = config.small_cap(h.level_cap(), ambient_n);
    const double quantum_base = std::pow(config.eps, 0.75) / 2.0;

    AdvantageContext actx{&oracle, &h.scaled_metric(), &ctx.terminal_ids, ctx.prep.scale,
                          config.adv_tuple_cap};

    std::vector<int> good_nodes;
    for (const auto& node : h.nodes()) {
        if (node.children.size() != 2) continue;
        const auto& c1 = h.nodes()[static_cast<std::size_t>(node.children[0])];
        const auto& c2 = h.nodes()[static_cast<std::size_t>(node.children[1])];
        if (c1.children.size() == 2 && c2.children.size() == 2) good_nodes.push_back(node.id);
    }
    if (good_nodes.empty()) return out;

    const int level_cap = static_cast<int>(h.level_cap());
    if (level_cap <= 4096) {
        // Per-level sampling, exactly as stated.
        for (int level = 0; level <= level_cap; ++level) {
            std::vector<int> eligible;
            std::vector<std::vector<int>> reps;
            for (int id : good_nodes) {
                const auto& node = h.nodes()[static_cast<std::size_t>(id)];
                if (!(node.level_created <= level && level < node.level_absorbed)) continue;
                std::vector<int> r = h.representatives(id, level);
                if (static_cast<double>(r.size()) <= cap) {
                    eligible.push_back(id);
                    reps.push_back(std::move(r));
                }
            }
            if (eligible.empty()) continue;

            std::size_t num = std::min(eligible.size(), config.step3_samples(ambient_n));
            std::vector<std::size_t> order(eligible.size());
            std::iota(order.begin(), order.end(), 0);
            auto rng = make_rng(derive_seed(seed, 0x53a0 + static_cast<std::uint64_t>(level)));
            std::shuffle(order.begin(), order.end(), rng);

            const double quantum = quantum_base * level_upper(level, config.eps);
            double b = 0.0;
            for (std::size_t s = 0; s < num; ++s) {
                const std::size_t pick = order[s];
                const double adv = compute_advantage(actx, h, eligible[pick], reps[pick],
                                                     derive_seed(seed, 0x4dc1));
                if (adv >= quantum) b += config.step3_sum_adv ? adv : quantum;
            }
            if (b > 0.0) {
                Step3LevelReport report;
                report.level = level;
                report.good_count = eligible.size();
                report.sampled = num;
                report.b = b;
                report.contribution = b * static_cast<double>(eligible.size()) / num;
                out.levels.push_back(report);
                out.statistic += report.contribution;
            }
        }
    } else {
        // Tiny eps: the per-level sample budget always covers every good set,
        // so the statistic decomposes per node and per run of constant
        // separated subset; accumulate those runs in closed form.
        for (int id : good_nodes) {
            const auto& node = h.nodes()[static_cast<std::size_t>(id)];
            const int lo = node.level_created;
            const int hi = std::min(node.level_absorbed - 1, level_cap);
            int level = lo;
            while (level <= hi) {
                std::vector<int> reps = h.representatives(id, level);
                // Find the maximal segment over which the subset is unchanged.
                int seg_hi = level;
                int step = 1;
                while (seg_hi < hi) {
                    const int probe = std::min(hi, seg_hi + step);
                    if (h.representatives(id, probe) == reps) {
                        seg_hi = probe;
                        step *= 2;
                    } else if (step == 1) {
                        break;
                    } else {
                        step = 1;
                    }
                }
                if (static_cast<double>(reps.size()) <= cap) {
                    const double adv =
                        compute_advantage(actx, h, id, reps, derive_seed(seed, 0x4dc1));
                    if (adv > 0.0) {
                        // Levels with quantum <= adv form a prefix.
                        const int adv_cut = static_cast<int>(std::floor(
                            std::log(adv / quantum_base) / std::log1p(config.eps)));
                        const int qual_hi = std::min(seg_hi, adv_cut);
                        if (qual_hi >= level) {
                            const double sum =
                                quantum_base * geometric_sum(1.0 + config.eps, level, qual_hi);
                            Step3LevelReport report;
                            report.level = level;
                            report.good_count = 1;
                            report.sampled = 1;
                            report.b = sum;
                            report.contribution = sum;
                            out.levels.push_back(report);
                            out.statistic += sum;
                        }
                    }
                }
                level = seg_hi + 1;
            }
        }
    }
    out.evidence = out.statistic > out.threshold;
    return out;
}

namespace {

EvidenceReport known_metric_pipeline(CountingOracle& oracle, const EstimatorConfig& config) {
    EvidenceReport report;
    PipelineContext ctx = build_pipeline_context(oracle, config);
    report.scale = ctx.prep.scale;
    report.removed_terminals = ctx.prep.removed;
    if (ctx.prep.degenerate) {
        report.degenerate = true;
        report.estimate = 0.0;
        report.queries = oracle.count();
        return report;
    }
    report.mst_scaled = ctx.hierarchy.mst_cost();

    report.step2 = step2_evidence(oracle, ctx, config, derive_seed(config.seed, 2));
    if (!report.step2.evidence) {
        report.step3 = step3_advantage(oracle, ctx, config, derive_seed(config.seed, 3));
    } else {
        report.step3.threshold = config.step3_evidence_constant *
                                 std::pow(config.eps, 0.75) * ctx.hierarchy.mst_cost();
    }
    report.evidence = report.step2.evidence || report.step3.evidence;
    report.estimate =
        (report.evidence ? (1.0 - config.eps0) : 1.0) * report.mst_scaled * report.scale;
    report.queries = oracle.count();
    return report;
}

}  // namespace

ExplorerPool::ExplorerPool(CountingOracle& oracle, std::vector<PointId> terminals, double scale,
                           const EstimatorConfig& config, double round_budget)
    : oracle_(&oracle),
      terminals_(std::move(terminals)),
      scale_(scale),
      config_(&config),
      round_budget_(round_budget) {}

ComponentExplorer& ExplorerPool::at_level(int level) {
    auto it = pool_.find(level);
    if (it == pool_.end()) {
        it = pool_.emplace(level, std::make_unique<ComponentExplorer>(
                                      *oracle_, terminals_, scale_, level, config_->eps,
                                      config_->eps1(), round_budget_,
                                      derive_seed(config_->seed, 0xe1 + static_cast<std::uint64_t>(
                                                                            level < 0 ? 1000 - level
                                                                                      : level))))
                 .first;
    }
    return *it->second;
}

namespace {

struct MetricFreeLevelOutcome {
    bool processed = false;
    double x_raw = 0.0;
    double x = 0.0;
    int universe = 0;
};

/// Level-i set-cover evidence through the exploration machinery. `explorer`
/// is the level-(i-1) structure.
MetricFreeLevelOutcome metric_free_step2_level(CountingOracle& oracle, ComponentExplorer& explorer,
                                               const EstimatorConfig& config, int level,
                                               double scale, double level_cap, std::uint64_t seed) {
    MetricFreeLevelOutcome outcome;
    const MetricInstance& instance = oracle.instance();
    const int n = instance.n();
    const int k = static_cast<int>(explorer.terminals().size());
    const double m = config.metric_free_m(n);
    const double cover_radius = config.cover_fraction * level_upper(level, config.eps);
    const std::vector<PointId> steiner = instance.steiner_points();
    auto rng = make_rng(derive_seed(seed, 0x3f00 + static_cast<std::uint64_t>(level)));

    const auto [first_reps, exhausted] = explorer.enumerate_representatives(
        static_cast<std::size_t>(config.rep_budget(m, level_cap, n)));

    const double small_cap = config.small_cap(level_cap, n);

    if (exhausted) {
        // The whole level structure is known; resolve every component and run
        // the plain estimator over the small ones.
        std::set<int> comp_seen;
        std::vector<std::vector<PointId>> universe_reps;
        for (PointId r : first_reps) {
            auto info = explorer.bfs_component(r);
            if (!info.small || info.component < 0) continue;
            if (!comp_seen.insert(info.component).second) continue;
            if (static_cast<double>(info.reps.size()) > small_cap) continue;
            universe_reps.push_back(info.reps);
        }
        if (universe_reps.empty()) return outcome;
        const int universe = static_cast<int>(universe_reps.size());
        const int num_real_sets = static_cast<int>(steiner.size());
        SetCoverView view(universe, num_real_sets + universe, [&](int element, int set) {
            if (set >= num_real_sets) return set - num_real_sets == element;
            const PointId v = steiner[static_cast<std::size_t>(set)];
            for (PointId u : universe_reps[static_cast<std::size_t>(element)])
                if (oracle.query(u, v) / scale <= cover_radius) return true;
            return false;
        });
        SetCoverEstimate est = alg_set_cover(view, config.eps, true,
                                             derive_seed(seed, 0x52c0 + level), config.setcover);
        outcome.processed = true;
        outcome.universe = universe;
        outcome.x_raw = est.x_raw;
        outcome.x = est.x;
        return outcome;
    }

    // Estimate |U_i| (count of small components) by inverse-size sampling.
    const int samples = config.usize_samples(k, m);
    double mean = 0.0;
    std::uniform_int_distribution<std::size_t> pick_terminal(0, explorer.terminals().size() - 1);
    for (int s = 0; s < samples; ++s) {
        const PointId u = explorer.terminals()[pick_terminal(rng)];
        auto info = explorer.bfs_component(u);
        if (info.small && info.terminal_count > 0) mean += 1.0 / info.terminal_count;
    }
    const double u_estimate = mean / samples * k;
    if (u_estimate < m / 2.0) return outcome;  // treated as light

    // T_high / T_low by the number of nearby Steiner vertices, then V_1 / V_2
    // by the number of nearby T_low terminals.
    const double r_threshold = config.mf_r(n);
    const double p_threshold = config.mf_p(n);
    std::unordered_map<PointId, char> t_low;
    std::vector<PointId> t_low_list;
    for (PointId u : explorer.terminals()) {
        int close = 0;
        for (PointId v : steiner)
            if (oracle.query(u, v) / scale <= cover_radius) ++close;
        if (static_cast<double>(close) < 2.0 * r_threshold) {
            t_low[u] = 1;
            t_low_list.push_back(u);
        }
    }
    std::vector<PointId> v1, v2;
    for (PointId v : steiner) {
        int close = 0;
        for (PointId u : t_low_list)
            if (oracle.query(u, v) / scale <= cover_radius) ++close;
        if (static_cast<double>(close) > 100.0 * p_threshold)
            v2.push_back(v);
        else
            v1.push_back(v);
    }

    // A component enters the matching universe if it is small and touches only
    // T_low terminals.
    auto low_component = [&](PointId u) -> std::pair<bool, ComponentExplorer::ComponentInfo> {
        auto info = explorer.bfs_component(u);
        if (!info.small) return {false, info};
        for (PointId r : info.reps)
            if (!t_low.count(r)) return {false, info};
        return {true, info};
    };

    // Component neighborhood in the shared-V1-Steiner graph. Components are
    // stable once their region is fully explored, so ids can key the memo.
    std::unordered_map<int, std::vector<int>> neighbor_memo;
    std::unordered_map<int, ComponentExplorer::ComponentInfo> comp_info;
    auto neighbors_of = [&](int comp, const ComponentExplorer::ComponentInfo& info)
        -> const std::vector<int>& {
        auto it = neighbor_memo.find(comp);
        if (it != neighbor_memo.end()) return it->second;
        std::set<int> result;
        for (PointId v : v1) {
            bool covers = false;
            for (PointId r : info.reps)
                if (oracle.query(r, v) / scale <= cover_radius) {
                    covers = true;
                    break;
                }
            if (!covers) continue;
            std::set<int> covered_comps;
            for (PointId u : explorer.terminals()) {
                if (!t_low.count(u)) continue;
                if (oracle.query(u, v) / scale > cover_radius) continue;
                auto [ok, other] = low_component(u);
                if (ok) {
                    covered_comps.insert(other.component);
                    comp_info.emplace(other.component, other);
                }
            }
            covered_comps.insert(comp);
            if (covered_comps.size() == 2) continue;  // cardinality-2 set, ignored
            for (int c : covered_comps)
                if (c != comp) result.insert(c);
        }
        return neighbor_memo.emplace(comp, std::vector<int>(result.begin(), result.end()))
            .first->second;
    };

    // Rank-greedy matched status of a component, resolved locally.
    std::unordered_map<std::uint64_t, bool> edge_memo;
    const std::uint64_t rank_seed = derive_seed(seed, 0x6d9e);
    auto edge_key = [](int a, int b) {
        if (a > b) std::swap(a, b);
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
               static_cast<std::uint32_t>(b);
    };
    std::function<bool(int, int)> edge_in_matching = [&](int a, int b) -> bool {
        const std::uint64_t key = edge_key(a, b);
        auto hit = edge_memo.find(key);
        if (hit != edge_memo.end()) return hit->second;
        const std::uint64_t my_rank = edge_rank(rank_seed, std::min(a, b), std::max(a, b));
        bool in = true;
        for (int endpoint : {a, b}) {
            std::vector<std::pair<std::uint64_t, int>> lower;
            for (int nb : neighbors_of(endpoint, comp_info.at(endpoint))) {
                const std::uint64_t rk = edge_rank(rank_seed, std::min(endpoint, nb),
                                                   std::max(endpoint, nb));
                if (rk < my_rank) lower.push_back({rk, nb});
            }
            std::sort(lower.begin(), lower.end());
            for (auto& [rk, nb] : lower) {
                if (nb == a || nb == b) continue;
                if (edge_in_matching(endpoint, nb)) {
                    in = false;
                    break;
                }
            }
            if (!in) break;
        }
        edge_memo.emplace(key, in);
        return in;
    };
    auto comp_matched = [&](int comp) -> bool {
        const auto& info = comp_info.at(comp);
        std::vector<std::pair<std::uint64_t, int>> incident;
        for (int nb : neighbors_of(comp, info))
            incident.push_back({edge_rank(rank_seed, std::min(comp, nb), std::max(comp, nb)), nb});
        std::sort(incident.begin(), incident.end());
        for (auto& [rk, nb] : incident)
            if (edge_in_matching(comp, nb)) return true;
        return false;
    };

    // Sample terminals; inverse terminal-count weighting makes each small
    // low component count once.
    const int s1 = std::max(8, std::min(config.mf_matching_samples, 4 * samples));
    double matched_mass = 0.0;
    double high_mass = 0.0;
    double v2_mass = 0.0;
    for (int s = 0; s < s1; ++s) {
        const PointId u = explorer.terminals()[pick_terminal(rng)];
        auto info = explorer.bfs_component(u);
        if (!info.small || info.terminal_count <= 0) continue;
        bool all_low = true;
        for (PointId r : info.reps)
            if (!t_low.count(r)) {
                all_low = false;
                break;
            }
        if (!all_low) {
            // Small component silenced by a T_high member: covered by the
            // random-set argument, counted like U_high.
            high_mass += 1.0 / info.terminal_count;
            continue;
        }
        comp_info.emplace(info.component, info);
        if (!v2.empty()) {
            bool covered_by_v2 = false;
            for (PointId v : v2) {
                for (PointId r : info.reps)
                    if (oracle.query(r, v) / scale <= cover_radius) {
                        covered_by_v2 = true;
                        break;
                    }
                if (covered_by_v2) break;
            }
            if (covered_by_v2) v2_mass += 1.0 / info.terminal_count;
        }
        if (comp_matched(info.component)) matched_mass += 1.0 / info.terminal_count;
    }
    const double x1 = 0.5 * matched_mass / s1 * k;
    const double union2 = v2_mass / s1 * k;
    const double x2 = v2.empty() ? 0.0
                                 : std::max(0.0, (union2 - static_cast<double>(v2.size())) / 2.0);
    const double u_high = high_mass / s1 * k;

    outcome.processed = true;
    outcome.universe = static_cast<int>(std::lround(u_estimate));
    outcome.x_raw = u_high - config.eps * u_estimate / 10.0 + (x1 + x2) / 2.0;
    outcome.x = 4.0 * outcome.x_raw + config.eps * u_estimate;
    return outcome;
}

}  // namespace

EvidenceReport simulate_steps_metric_free(CountingOracle& oracle, const EstimatorConfig& config) {
    const int n = oracle.instance().n();
    const int k = oracle.instance().k();
    const double cutoff = std::pow(static_cast<double>(n), 6.0 / 7.0);

    if (static_cast<double>(k) < cutoff) {
        // Few terminals: materializing the induced metric is already within
        // budget, so the metric-aware pipeline runs unchanged.
        EvidenceReport report = known_metric_pipeline(oracle, config);
        report.metric_free = true;
        report.delegated = true;
        return report;
    }

    EvidenceReport report;
    report.metric_free = true;

    // Step 1 runs on the materialized terminal metric: it fixes the exact
    // scale, the MST value the final answer is expressed in, and the candidate
    // levels. Steps 2 and 3 below go through the exploration machinery only.
    PipelineContext ctx = build_pipeline_context(oracle, config);
    report.scale = ctx.prep.scale;
    report.removed_terminals = ctx.prep.removed;
    if (ctx.prep.degenerate) {
        report.degenerate = true;
        report.queries = oracle.count();
        return report;
    }
    report.mst_scaled = ctx.hierarchy.mst_cost();
    const double level_cap = ctx.hierarchy.level_cap();

    ExplorerPool pool(oracle, ctx.terminal_ids, ctx.prep.scale, config,
                      config.bfs_round_budget(level_cap, n));

    // Candidate levels: populated MST levels and their neighbors (the
    // explored structure sits between consecutive level graphs).
    std::set<int> candidates{0, 1};
    for (const auto& [level, weight] : ctx.hierarchy.level_weights()) {
        (void)weight;
        for (int delta = -1; delta <= 1; ++delta) {
            const int cand = level + delta;
            if (cand >= 0 && cand <= static_cast<int>(level_cap)) candidates.insert(cand);
        }
    }

    Step2Result& step2 = report.step2;
    step2.threshold = config.step2_evidence_constant * config.eps0 * report.mst_scaled;
    for (int level : candidates) {
        MetricFreeLevelOutcome outcome = metric_free_step2_level(
            oracle, pool.at_level(level - 1), config, level, ctx.prep.scale, level_cap,
            derive_seed(config.seed, 2));
        if (!outcome.processed) continue;
        Step2LevelReport lr;
        lr.level = level;
        lr.universe_size = outcome.universe;
        lr.x = outcome.x;
        lr.x_raw = outcome.x_raw;
        step2.levels.push_back(lr);
        step2.statistic += level_upper(level, config.eps) * std::max(outcome.x_raw, 0.0);
    }
    step2.evidence = step2.statistic > step2.threshold;

    Step3Result& step3 = report.step3;
    step3.threshold =
        config.step3_evidence_constant * std::pow(config.eps, 0.75) * report.mst_scaled;
    if (!step2.evidence) {
        const double quantum_base = std::pow(config.eps, 0.75) / 2.0;
        const int window =
            static_cast<int>(std::ceil(std::log(1.0 / config.eps0) / std::log1p(config.eps)));
        auto rng = make_rng(derive_seed(config.seed, 0x5733));
        std::uniform_int_distribution<std::size_t> pick_terminal(0, ctx.terminal_ids.size() - 1);
        AdvantageContext actx{&oracle, &ctx.prep.scaled_terminal_metric, &ctx.terminal_ids,
                              ctx.prep.scale, config.adv_tuple_cap};

        // The advantage signal lives on whole level bands, so every level is
        // sampled (the per-level work is component lookups plus memoized
        // advantage evaluations). Beyond the per-run memo the component
        // exploration reuses the shared per-level marks.
        std::unordered_map<std::uint64_t, double> adv_memo;
        const int top = std::min(static_cast<int>(level_cap), 4096);
        for (int level = 0; level <= top; ++level) {
            ComponentExplorer& explorer = pool.at_level(level - 1);
            const std::size_t s3 = std::min<std::size_t>(config.step3_samples(n), 64);
            const double quantum = quantum_base * level_upper(level, config.eps);
            double mass = 0.0;
            std::size_t hits = 0;
            for (std::size_t s = 0; s < s3; ++s) {
                const std::size_t t_index = pick_terminal(rng);
                const PointId u = ctx.terminal_ids[t_index];
                auto info = explorer.bfs_component(u);
                if (!info.small || info.terminal_count <= 0) continue;
                // Resolve the two-generation split of this component within the
                // advantage window via the scaled hierarchy restricted to it.
                int node = ctx.hierarchy.node_of_terminal(static_cast<int>(t_index), level);
                const auto& hnode = ctx.hierarchy.nodes()[static_cast<std::size_t>(node)];
                if (hnode.children.size() != 2) continue;
                const auto& c1 = ctx.hierarchy.nodes()[static_cast<std::size_t>(hnode.children[0])];
                const auto& c2 = ctx.hierarchy.nodes()[static_cast<std::size_t>(hnode.children[1])];
                if (c1.children.size() != 2 || c2.children.size() != 2) continue;
                if (c1.level_created < level - window || c2.level_created < level - window)
                    continue;
                const std::uint64_t memo_key =
                    (static_cast<std::uint64_t>(static_cast<std::uint32_t>(node)) << 32) |
                    static_cast<std::uint32_t>(level);
                auto memo = adv_memo.find(memo_key);
                if (memo == adv_memo.end())
                    memo = adv_memo
                               .emplace(memo_key,
                                        compute_advantage(
                                            actx, ctx.hierarchy, node,
                                            ctx.hierarchy.representatives(node, level),
                                            derive_seed(config.seed, 0x4dc1)))
                               .first;
                if (memo->second >= quantum) {
                    mass += 1.0 / hnode.members.size();
                    ++hits;
                }
            }
            if (hits > 0) {
                const double estimate_count = mass / static_cast<double>(s3) *
                                              static_cast<double>(ctx.terminal_ids.size());
                Step3LevelReport lr;
                lr.level = level;
                lr.good_count = hits;
                lr.sampled = s3;
                lr.b = quantum * static_cast<double>(hits);
                lr.contribution = quantum * estimate_count;
                step3.levels.push_back(lr);
                step3.statistic += lr.contribution;
            }
        }
        step3.evidence = step3.statistic > step3.threshold;
    }

    report.evidence = step2.evidence || step3.evidence;
    report.estimate =
        (report.evidence ? (1.0 - config.eps0) : 1.0) * report.mst_scaled * report.scale;
    report.queries = oracle.count();
    return report;
}

EvidenceReport estimate_cost(CountingOracle& oracle, const EstimatorConfig& config) {
    if (oracle.instance().k() < 2) {
        EvidenceReport report;
        report.degenerate = true;
        report.estimate = 0.0;
        return report;
    }
    if (config.know_terminal_metric) return known_metric_pipeline(oracle, config);
    return simulate_steps_metric_free(oracle, config);
}

}  // namespace stq
