#include "stq/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "stq/alpha.hpp"
#include "stq/baselines.hpp"
#include "stq/estimator.hpp"
#include "stq/generators.hpp"
#include "stq/hashing.hpp"
#include "stq/metric.hpp"
#include "stq/setcover.hpp"

namespace stq {

namespace {

using nlohmann::json;

std::optional<SteinerTree> exact_reference(const MetricInstance& instance) {
    if (instance.n() - instance.k() <= 20)
        return exact_steiner(instance, ExactMethod::SubsetEnum);
    if (instance.k() <= 14) return exact_steiner(instance, ExactMethod::DreyfusWagner);
    return std::nullopt;
}

std::string compact_cell(const json& doc) {
    json copy = doc;
    copy.erase("seed");
    return copy.dump();
}

SetSystem random_set_system(int universe, int sets, double density, std::uint64_t seed) {
    SetSystem sys;
    sys.universe = universe;
    auto rng = make_rng(derive_seed(seed, 0x5e75));
    std::bernoulli_distribution coin(density);
    for (int s = 0; s < sets; ++s) {
        std::vector<int> members;
        for (int e = 0; e < universe; ++e)
            if (coin(rng)) members.push_back(e);
        sys.sets.push_back(std::move(members));
    }
    return sys.with_singletons();
}

}  // namespace

ExperimentSpec parse_experiment_spec(const std::string& json_text) {
    const json doc = json::parse(json_text);
    ExperimentSpec spec;
    spec.algorithm = doc.at("algorithm").get<std::string>();
    if (spec.algorithm.empty()) throw std::invalid_argument("experiment needs an algorithm");
    if (!doc.contains("grid") || !doc.at("grid").is_array() || doc.at("grid").empty())
        throw std::invalid_argument("experiment grid must be a nonempty array");
    for (const auto& cell : doc.at("grid")) spec.grid.push_back(cell.dump());
    spec.seeds_per_cell = doc.value("seeds", 1);
    if (spec.seeds_per_cell < 1) throw std::invalid_argument("seeds must be at least 1");
    spec.base_seed = doc.value("seed", std::uint64_t{0});
    spec.options_json = doc.value("options", json::object()).dump();
    return spec;
}

double query_bound_value(BoundExpr expr, int n, int k, double eps, double extra) {
    const double nn = static_cast<double>(n);
    const double kk = static_cast<double>(k);
    const double log_n = std::log(std::max(2.0, nn));
    switch (expr) {
        case BoundExpr::SetCover:
            return (std::pow(nn, 1.5) + std::pow(nn, 0.75) * kk) * log_n * log_n /
                   (eps * eps * eps);
        case BoundExpr::EstimatorKnown:
            return std::pow(nn, 1.5) + std::pow(nn, 0.75) * kk;
        case BoundExpr::EstimatorMetricFree:
            return std::pow(nn, 12.0 / 7.0) + std::pow(nn, 6.0 / 7.0) * kk;
        case BoundExpr::Alpha:
            return kk * std::ceil(kk / extra);  // extra = beta
    }
    throw std::logic_error("unreachable");
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
    ExperimentResult result;
    result.spec = spec;
    const json options = json::parse(spec.options_json);

    for (std::size_t cell_index = 0; cell_index < spec.grid.size(); ++cell_index) {
        const json cell_doc = json::parse(spec.grid[cell_index]);
        for (int rep = 0; rep < spec.seeds_per_cell; ++rep) {
            const std::uint64_t trial_seed =
                derive_seed(spec.base_seed, (static_cast<std::uint64_t>(cell_index) << 20) |
                                                static_cast<std::uint64_t>(rep));
            TrialRecord record;
            record.cell = compact_cell(cell_doc);
            record.cell_index = static_cast<int>(cell_index);
            record.seed = trial_seed;
            const auto t0 = std::chrono::steady_clock::now();

            if (spec.algorithm == "setcover_estimator") {
                const json params = cell_doc.value("params", json::object());
                const int universe = params.at("universe").get<int>();
                const int sets = params.at("sets").get<int>();
                const double density = params.value("density", 0.3);
                const double eps = options.value("eps", 0.2);
                const bool exclude_two = options.value("exclude_two", true);
                SetSystem sys = random_set_system(universe, sets, density, trial_seed);
                SetCoverView view = sys.view();
                SetCoverEstimate est =
                    alg_set_cover(view, eps, exclude_two, derive_seed(trial_seed, 1));
                record.n = static_cast<int>(sys.sets.size());
                record.k = universe;
                record.value = est.x;
                record.queries = est.probes;
                record.bound = query_bound_value(BoundExpr::SetCover,
                                                 static_cast<int>(sys.sets.size()), universe, eps,
                                                 0.0);
                if (universe <= 20) {
                    const double y = exact_cover_objective(sys, exclude_two);
                    record.exact = y;
                    record.ratio = y > 0 ? est.x / y : est.x;
                    record.violation = !(y <= est.x + 1e-9 &&
                                         est.x <= 4.0 * y + eps * universe + 1e-9);
                }
            } else {
                json gen_doc = cell_doc;
                gen_doc["seed"] = trial_seed;
                MetricInstance instance = gen_from_json(gen_doc.dump());
                record.n = instance.n();
                record.k = instance.k();
                std::optional<SteinerTree> exact = exact_reference(instance);
                if (exact) record.exact = exact->cost;

                if (spec.algorithm == "st_estimator") {
                    EstimatorConfig config = options.value("preset", std::string("demo")) == "paper"
                                                 ? EstimatorConfig::paper(trial_seed)
                                                 : EstimatorConfig::demo(trial_seed);
                    config.know_terminal_metric = options.value("know_terminal_metric", true);
                    CountingOracle oracle(instance);
                    EvidenceReport report = estimate_cost(oracle, config);
                    record.value = report.estimate;
                    record.queries = report.queries;
                    record.verdict = report.evidence ? "evidence" : "no-evidence";
                    record.bound = query_bound_value(config.know_terminal_metric
                                                         ? BoundExpr::EstimatorKnown
                                                         : BoundExpr::EstimatorMetricFree,
                                                     instance.n(), instance.k(), config.eps, 0.0);
                    const double mst_rescaled = report.mst_scaled * report.scale;
                    const double tol = 1e-9 * std::max(1.0, mst_rescaled);
                    record.violation =
                        !report.degenerate &&
                        !(std::abs(record.value - mst_rescaled) <= tol ||
                          std::abs(record.value - (1.0 - config.eps0) * mst_rescaled) <= tol);
                    if (exact && !report.degenerate) {
                        record.ratio = record.value / exact->cost;
                        if (!(exact->cost <= 2.0 * record.value + 1e-9 &&
                              record.value <= 2.0 * exact->cost + 1e-9))
                            record.violation = true;
                    }
                } else if (spec.algorithm == "alpha_approx") {
                    const double alpha = options.value("alpha", 4.0);
                    CountingOracle oracle(instance);
                    AlphaRun run = approx_steiner_alpha(oracle, alpha, trial_seed);
                    record.value = run.tree.cost;
                    record.queries = run.queries;
                    record.bound = query_bound_value(BoundExpr::Alpha, instance.n(), instance.k(),
                                                     0.0, std::max(run.beta, 1e-9));
                    record.verdict = run.fallback ? "fallback" : "sampled";
                    if (exact) {
                        record.ratio = run.tree.cost / exact->cost;
                        record.violation = run.tree.cost > alpha * exact->cost + 1e-9;
                    }
                    if (static_cast<double>(record.queries) > record.bound + 0.5)
                        record.violation = true;
                } else if (spec.algorithm == "solve") {
                    const std::string method = options.value("method", std::string("mst"));
                    CountingOracle oracle(instance);
                    SteinerTree tree;
                    if (method == "mst") {
                        tree = terminal_mst(oracle).tree;
                    } else if (method == "exact-subset") {
                        tree = exact_steiner(instance, ExactMethod::SubsetEnum);
                    } else if (method == "exact-dw") {
                        tree = exact_steiner(instance, ExactMethod::DreyfusWagner);
                    } else if (method == "good-tree") {
                        tree = good_tree_approx(oracle);
                    } else {
                        throw std::invalid_argument("unknown solve method: " + method);
                    }
                    record.value = tree.cost;
                    record.queries = oracle.count();
                    record.bound = static_cast<double>(instance.n()) * instance.k();
                    if (exact) record.ratio = tree.cost / exact->cost;
                } else {
                    throw std::invalid_argument("unknown algorithm: " + spec.algorithm);
                }
            }

            record.millis = std::chrono::duration<double, std::milli>(
                                std::chrono::steady_clock::now() - t0)
                                .count();
            result.records.push_back(std::move(record));
        }
    }

    // Summaries are recomputed from the raw records.
    std::map<std::string, CellSummary> cells;
    for (const TrialRecord& r : result.records) {
        CellSummary& c = cells[r.cell];
        c.cell = r.cell;
        ++c.trials;
        if (r.violation) ++c.violations;
        if (r.ratio) c.max_ratio = std::max(c.max_ratio, *r.ratio);
        ++result.summary.trials;
        if (r.violation) ++result.summary.violations;
        if (r.ratio) result.summary.max_ratio = std::max(result.summary.max_ratio, *r.ratio);
    }
    for (auto& [_, c] : cells) result.summary.cells.push_back(c);
    if (result.records.size() >= 3) {
        QueryBoundFit fit = fit_query_bound(result.records);
        result.summary.fitted_constant = fit.constant;
    }
    result.summary.loglog_slope = loglog_query_slope(result.records);
    return result;
}

void write_trials_csv(const ExperimentResult& result, std::ostream& out) {
    out << "# steinerq trials v1: cell,n,k,seed,value,exact,ratio,queries,bound,verdict,violation\n";
    out.precision(12);
    for (const TrialRecord& r : result.records) {
        std::string cell = r.cell;
        std::replace(cell.begin(), cell.end(), ',', ';');
        out << '"' << cell << '"' << ',' << r.n << ',' << r.k << ',' << r.seed << ',' << r.value
            << ',' << (r.exact ? std::to_string(*r.exact) : "") << ','
            << (r.ratio ? std::to_string(*r.ratio) : "") << ',' << r.queries << ',' << r.bound
            << ',' << r.verdict << ',' << (r.violation ? 1 : 0) << '\n';
    }
}

void write_trials_json(const ExperimentResult& result, std::ostream& out) {
    json doc;
    doc["algorithm"] = result.spec.algorithm;
    doc["trials"] = json::array();
    for (const TrialRecord& r : result.records) {
        json t;
        t["cell"] = r.cell;
        t["n"] = r.n;
        t["k"] = r.k;
        t["seed"] = r.seed;
        t["value"] = r.value;
        if (r.exact) t["exact"] = *r.exact;
        if (r.ratio) t["ratio"] = *r.ratio;
        t["queries"] = r.queries;
        t["bound"] = r.bound;
        t["verdict"] = r.verdict;
        t["violation"] = r.violation;
        t["millis"] = r.millis;
        doc["trials"].push_back(t);
    }
    json summary;
    summary["trials"] = result.summary.trials;
    summary["violations"] = result.summary.violations;
    summary["max_ratio"] = result.summary.max_ratio;
    summary["fitted_constant"] = result.summary.fitted_constant;
    summary["loglog_slope"] = result.summary.loglog_slope;
    summary["cells"] = json::array();
    for (const CellSummary& c : result.summary.cells) {
        json cj;
        cj["cell"] = c.cell;
        cj["trials"] = c.trials;
        cj["violations"] = c.violations;
        cj["max_ratio"] = c.max_ratio;
        summary["cells"].push_back(cj);
    }
    doc["summary"] = summary;
    out << doc.dump(2) << '\n';
}

QueryBoundFit fit_query_bound(const std::vector<TrialRecord>& records) {
    if (records.size() < 3) throw std::invalid_argument("need at least 3 records to fit");
    QueryBoundFit fit;
    for (const TrialRecord& r : records) {
        if (r.bound <= 0.0) continue;
        fit.constant = std::max(fit.constant, static_cast<double>(r.queries) / r.bound);
    }
    for (std::size_t i = 0; i < records.size(); ++i) {
        const TrialRecord& r = records[i];
        if (r.bound <= 0.0) continue;
        if (static_cast<double>(r.queries) > 1e6 * r.bound) fit.anomalies.push_back(static_cast<int>(i));
        if (r.queries > 0 && fit.constant > 0.0)
            fit.residuals.push_back(std::log(static_cast<double>(r.queries)) -
                                    std::log(fit.constant * r.bound));
    }
    return fit;
}

double loglog_query_slope(const std::vector<TrialRecord>& records) {
    std::map<int, std::pair<double, int>> by_n;
    for (const TrialRecord& r : records) {
        if (r.n <= 0 || r.queries == 0) continue;
        auto& [sum, count] = by_n[r.n];
        sum += static_cast<double>(r.queries);
        ++count;
    }
    if (by_n.size() < 2) return 0.0;
    std::vector<std::pair<double, double>> pts;
    for (const auto& [n, agg] : by_n)
        pts.push_back({std::log(static_cast<double>(n)), std::log(agg.first / agg.second)});
    double mx = 0, my = 0;
    for (auto& [x, y] : pts) {
        mx += x;
        my += y;
    }
    mx /= pts.size();
    my /= pts.size();
    double num = 0, den = 0;
    for (auto& [x, y] : pts) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    return den > 0 ? num / den : 0.0;
}

}  // namespace stq
