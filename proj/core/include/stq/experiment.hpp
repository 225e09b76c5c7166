#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace stq {

/// One experiment: an algorithm id, a grid of instance cells (generator-spec
/// JSON objects without seeds), seeds per cell, and algorithm options.
struct ExperimentSpec {
    std::string algorithm;                 // st_estimator | alpha_approx | setcover_estimator | solve
    std::vector<std::string> grid;         // generator-spec JSON per cell
    int seeds_per_cell = 1;
    std::uint64_t base_seed = 0;
    std::string options_json = "{}";       // algorithm-specific options
};

ExperimentSpec parse_experiment_spec(const std::string& json_text);

struct TrialRecord {
    std::string cell;       // compact cell descriptor
    int cell_index = 0;
    int n = 0;
    int k = 0;
    std::uint64_t seed = 0;
    double value = 0.0;     // estimate or tree cost
    std::optional<double> exact;
    std::optional<double> ratio;
    std::uint64_t queries = 0;
    double bound = 0.0;     // value of the query-bound expression for this trial
    std::string verdict;
    bool violation = false;
    double millis = 0.0;    // excluded from the CSV so reruns are byte-identical
};

struct CellSummary {
    std::string cell;
    int trials = 0;
    int violations = 0;
    double max_ratio = 0.0;
};

struct ExperimentSummary {
    int trials = 0;
    int violations = 0;
    double max_ratio = 0.0;
    double fitted_constant = 0.0;   // max over records of queries / bound
    double loglog_slope = 0.0;      // of mean queries against n (0 if < 2 sizes)
    std::vector<CellSummary> cells;
};

struct ExperimentResult {
    ExperimentSpec spec;
    std::vector<TrialRecord> records;
    ExperimentSummary summary;
};

ExperimentResult run_experiment(const ExperimentSpec& spec);

/// CSV column set is fixed and versioned in the header comment; reruns with
/// identical seeds produce byte-identical files.
void write_trials_csv(const ExperimentResult& result, std::ostream& out);
void write_trials_json(const ExperimentResult& result, std::ostream& out);

enum class BoundExpr { SetCover, EstimatorKnown, EstimatorMetricFree, Alpha };

struct QueryBoundFit {
    double constant = 0.0;           // max over records of queries / bound
    std::vector<double> residuals;   // log(queries) - log(constant * bound)
    std::vector<int> anomalies;      // record indices with queries > 1e6 * bound
};

/// Requires at least 3 records with positive bound values.
QueryBoundFit fit_query_bound(const std::vector<TrialRecord>& records);

/// Least-squares slope of log(mean queries) against log(n); needs >= 2
/// distinct n values.
double loglog_query_slope(const std::vector<TrialRecord>& records);

/// The bound expressions used when recording trials.
double query_bound_value(BoundExpr expr, int n, int k, double eps, double extra);

}  // namespace stq
