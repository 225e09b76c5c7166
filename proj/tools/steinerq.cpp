// Command-line front end: instance generation, Steiner solvers, the cost
// estimator, the set-cover objective estimator, the sampled spanning
// algorithm, and batch experiments.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "stq/alpha.hpp"
#include "stq/baselines.hpp"
#include "stq/estimator.hpp"
#include "stq/experiment.hpp"
#include "stq/generators.hpp"
#include "stq/metric.hpp"
#include "stq/setcover.hpp"

namespace {

using nlohmann::json;

std::uint64_t default_seed() {
    if (const char* env = std::getenv("SS_SEED")) return std::strtoull(env, nullptr, 10);
    return 0;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

json tree_to_json(const stq::SteinerTree& tree) {
    json edges = json::array();
    for (const auto& e : tree.edges) edges.push_back({e.u, e.v, e.w});
    return edges;
}

json step2_json(const stq::Step2Result& r) {
    json levels = json::array();
    for (const auto& lr : r.levels)
        levels.push_back({{"level", lr.level},
                          {"universe", lr.universe_size},
                          {"level_sets", lr.level_set_count},
                          {"x", lr.x},
                          {"x_raw", lr.x_raw}});
    return {{"levels", levels},
            {"statistic", r.statistic},
            {"threshold", r.threshold},
            {"evidence", r.evidence}};
}

json step3_json(const stq::Step3Result& r) {
    json levels = json::array();
    for (const auto& lr : r.levels)
        levels.push_back({{"level", lr.level},
                          {"good_count", lr.good_count},
                          {"sampled", lr.sampled},
                          {"b", lr.b},
                          {"contribution", lr.contribution}});
    return {{"levels", levels},
            {"statistic", r.statistic},
            {"threshold", r.threshold},
            {"evidence", r.evidence}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sublinear-query Steiner tree toolkit"};
    app.require_subcommand(1);

    // ---- gen ----
    auto* gen = app.add_subcommand("gen", "generate a metric instance");
    std::string gen_spec_file, gen_spec_inline, gen_out;
    gen->add_option("--spec", gen_spec_file, "generator-spec JSON file");
    gen->add_option("--spec-json", gen_spec_inline, "generator-spec JSON literal");
    gen->add_option("--out", gen_out, "output instance file")->required();

    bool no_validate = false;
    app.add_flag("--no-validate", no_validate,
                 "skip the O(n^3) triangle-inequality check when loading instance files");

    // ---- solve ----
    auto* solve = app.add_subcommand("solve", "run a Steiner solver on an instance file");
    std::string solve_method = "mst", solve_instance;
    solve->add_option("--method", solve_method, "mst | exact-subset | exact-dw | good-tree");
    solve->add_option("--instance", solve_instance)->required();

    // ---- estimate ----
    auto* estimate = app.add_subcommand("estimate", "estimate the Steiner tree cost");
    std::string est_instance, est_preset = "demo", est_json_out;
    std::uint64_t est_seed = default_seed();
    bool est_know_metric = true;
    estimate->add_option("--instance", est_instance)->required();
    estimate->add_option("--preset", est_preset, "paper | demo");
    estimate->add_option("--seed", est_seed);
    estimate->add_option("--know-terminal-metric", est_know_metric);
    estimate->add_option("--json-out", est_json_out);

    // ---- setcover-est ----
    auto* scest = app.add_subcommand("setcover-est", "estimate |U| - SC over a set system file");
    std::string sc_instance, sc_preset = "paper";
    double sc_eps = 0.2;
    bool sc_exclude_two = false;
    std::uint64_t sc_seed = default_seed();
    scest->add_option("--instance", sc_instance)->required();
    scest->add_option("--eps", sc_eps);
    scest->add_flag("--exclude-two", sc_exclude_two);
    scest->add_option("--seed", sc_seed);
    scest->add_option("--preset", sc_preset, "paper | demo (scaled partition constants)");

    // ---- alpha-approx ----
    auto* alpha = app.add_subcommand("alpha-approx", "sampled-core alpha-approximate tree");
    std::string alpha_instance;
    double alpha_value = 4.0;
    std::uint64_t alpha_seed = default_seed();
    alpha->add_option("--instance", alpha_instance)->required();
    alpha->add_option("--alpha", alpha_value);
    alpha->add_option("--seed", alpha_seed);

    // ---- experiment ----
    auto* experiment = app.add_subcommand("experiment", "run a seeded trial batch");
    std::string exp_spec, exp_out;
    double exp_tolerance = 0.0;
    experiment->add_option("--spec", exp_spec, "experiment spec JSON file")->required();
    experiment->add_option("--out", exp_out, "output directory")->required();
    experiment->add_option("--violation-tolerance", exp_tolerance,
                           "allowed guarantee-violation rate before a nonzero exit");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            std::string text;
            if (!gen_spec_file.empty())
                text = read_file(gen_spec_file);
            else if (!gen_spec_inline.empty())
                text = gen_spec_inline;
            else
                throw std::runtime_error("gen needs --spec or --spec-json");
            stq::MetricInstance instance = stq::gen_from_json(text);
            stq::save_instance_file(instance, gen_out);
            std::cout << json{{"n", instance.n()}, {"k", instance.k()}, {"out", gen_out}}.dump()
                      << '\n';
        } else if (*solve) {
            stq::MetricInstance instance = stq::load_instance_file(solve_instance, !no_validate);
            stq::CountingOracle oracle(instance);
            stq::SteinerTree tree;
            if (solve_method == "mst") {
                tree = stq::terminal_mst(oracle).tree;
            } else if (solve_method == "exact-subset") {
                tree = stq::exact_steiner(instance, stq::ExactMethod::SubsetEnum);
            } else if (solve_method == "exact-dw") {
                tree = stq::exact_steiner(instance, stq::ExactMethod::DreyfusWagner);
            } else if (solve_method == "good-tree") {
                tree = stq::good_tree_approx(oracle);
            } else {
                throw std::runtime_error("unknown method: " + solve_method);
            }
            std::cout << json{{"cost", tree.cost},
                              {"edges", tree_to_json(tree)},
                              {"queries", oracle.count()}}
                             .dump()
                      << '\n';
        } else if (*estimate) {
            stq::MetricInstance instance = stq::load_instance_file(est_instance, !no_validate);
            stq::EstimatorConfig config = est_preset == "paper"
                                              ? stq::EstimatorConfig::paper(est_seed)
                                              : stq::EstimatorConfig::demo(est_seed);
            config.know_terminal_metric = est_know_metric;
            stq::CountingOracle oracle(instance);
            stq::EvidenceReport report = stq::estimate_cost(oracle, config);
            json doc{{"estimate", report.estimate},
                     {"evidence", report.evidence},
                     {"queries", report.queries},
                     {"scale", report.scale},
                     {"mst_scaled", report.mst_scaled},
                     {"degenerate", report.degenerate},
                     {"metric_free", report.metric_free},
                     {"delegated", report.delegated},
                     {"removed_terminals", report.removed_terminals},
                     {"step2", step2_json(report.step2)},
                     {"step3", step3_json(report.step3)}};
            if (!est_json_out.empty()) {
                std::ofstream out(est_json_out);
                out << doc.dump(2) << '\n';
            }
            std::cout << doc.dump() << '\n';
        } else if (*scest) {
            std::ifstream in(sc_instance);
            if (!in) throw std::runtime_error("cannot open " + sc_instance);
            stq::SetSystem sys = stq::load_set_system(in).with_singletons();
            stq::AlgSetCoverParams params;
            if (sc_preset == "demo") {
                params.c_freq /= 50.0;
                params.c_n /= 50.0;
                params.c_split /= 50.0;
            }
            stq::SetCoverView view = sys.view();
            stq::SetCoverEstimate est =
                stq::alg_set_cover(view, sc_eps, sc_exclude_two, sc_seed, params);
            json doc{{"X", est.x},
                     {"X_raw", est.x_raw},
                     {"probes", est.probes},
                     {"u_low", est.u_low_size},
                     {"u_high", est.u_high_size}};
            if (sys.universe <= 20) {
                const int y = stq::exact_cover_objective(sys, sc_exclude_two);
                doc["Y_exact"] = y;
                doc["within_bound"] =
                    y <= est.x + 1e-9 && est.x <= 4.0 * y + sc_eps * sys.universe + 1e-9;
            }
            std::cout << doc.dump() << '\n';
        } else if (*alpha) {
            stq::MetricInstance instance = stq::load_instance_file(alpha_instance, !no_validate);
            stq::CountingOracle oracle(instance);
            stq::AlphaRun run = stq::approx_steiner_alpha(oracle, alpha_value, alpha_seed);
            json doc{{"cost", run.tree.cost},
                     {"queries", run.queries},
                     {"core_size", run.core.size()},
                     {"fallback", run.fallback}};
            if (instance.n() - instance.k() <= 20) {
                const double exact =
                    stq::exact_steiner(instance, stq::ExactMethod::SubsetEnum).cost;
                doc["ratio_vs_exact"] = run.tree.cost / exact;
            } else if (instance.k() <= 14) {
                const double exact =
                    stq::exact_steiner(instance, stq::ExactMethod::DreyfusWagner).cost;
                doc["ratio_vs_exact"] = run.tree.cost / exact;
            }
            std::cout << doc.dump() << '\n';
        } else if (*experiment) {
            stq::ExperimentSpec spec = stq::parse_experiment_spec(read_file(exp_spec));
            if (spec.base_seed == 0) spec.base_seed = default_seed();
            stq::ExperimentResult result = stq::run_experiment(spec);
            std::filesystem::create_directories(exp_out);
            {
                std::ofstream csv(exp_out + "/trials.csv");
                stq::write_trials_csv(result, csv);
            }
            {
                std::ofstream js(exp_out + "/trials.json");
                stq::write_trials_json(result, js);
            }
            const double rate = result.summary.trials == 0
                                    ? 0.0
                                    : static_cast<double>(result.summary.violations) /
                                          result.summary.trials;
            std::cout << json{{"trials", result.summary.trials},
                              {"violations", result.summary.violations},
                              {"violation_rate", rate},
                              {"max_ratio", result.summary.max_ratio},
                              {"fitted_constant", result.summary.fitted_constant},
                              {"loglog_slope", result.summary.loglog_slope},
                              {"out", exp_out}}
                             .dump()
                      << '\n';
            if (rate > exp_tolerance) return 2;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
