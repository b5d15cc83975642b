#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "povm/serialize.hpp"

namespace povm {

struct ExperimentConfig {
    std::string experiment;
    std::uint64_t seed = 0;
    std::size_t trials = 1;
    std::vector<std::size_t> m_schedule;
    Json params = Json::object();
    Json tolerances = Json::object();
    std::string class_file;        // optional; builtin classes otherwise
    std::string distribution_file; // optional; builtin distributions otherwise
    std::string output_dir;

    Json to_json() const;
};

// Throws ConfigError on missing seed, empty schedule (where one is needed) or unknown experiment.
ExperimentConfig config_from_json(const Json& j);

struct CriterionResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ResultRecord {
    std::string experiment;
    std::string config_hash;
    std::string input_hash;
    Json trials = Json::array();   // per-trial outputs, sorted by (m, trial)
    Json summary = Json::object();
    std::vector<CriterionResult> criteria;
    std::vector<std::string> curve_columns; // header names carry units
    std::vector<std::vector<double>> curve_rows;
    double wall_seconds = 0.0;

    bool all_passed() const;
    // Content hash of everything except wall time.
    std::string hash() const;
    Json to_json() const;
    std::string curves_csv() const;
};

// Checks a serialized ResultRecord against the published result schema
// (required keys and their JSON types). Returns an empty string when valid.
std::string validate_result_json(const Json& j);

// Worker count: POVM_LEARN_THREADS if set, else hardware concurrency.
std::size_t worker_threads();

// Runs fn(i) for i in [0, n) on the worker pool; results come back in index order.
std::vector<Json> parallel_trials(std::size_t n, const std::function<Json(std::size_t)>& fn,
                                  std::size_t threads = 0);

ResultRecord run_erm_failure(const ExperimentConfig& config);
ResultRecord run_derm_success(const ExperimentConfig& config);
ResultRecord run_finite_dim(const ExperimentConfig& config);
ResultRecord run_unlearnable(const ExperimentConfig& config);
ResultRecord run_bounds_report(const ExperimentConfig& config);

// Dispatch on config.experiment; applies tolerance overrides for the duration of the run.
ResultRecord run_experiment(const ExperimentConfig& config);

// Exact P(min empirical risk over the class = 0) for ERM on the embedded
// counterexample class at sample size m, given the member crossovers.
double erm_zero_risk_probability(const std::vector<double>& crossovers, std::size_t m, bool include_h_star);

// Exact P(DERM returns h_star) on the two-element partition {hat class, {h_star}}
// with n_hat samples on the hat element.
double derm_h_star_probability(const std::vector<double>& crossovers, std::size_t n_hat);

// results.json, curves.csv and, when svg is set, curves.svg.
void write_outputs(const ResultRecord& record, const std::string& dir, bool svg);

// Line chart of every curve column against the first one.
std::string render_svg(const ResultRecord& record);

} // namespace povm
