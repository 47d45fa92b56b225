#pragma once

#include "intdc/baselines.hpp"
#include "intdc/iee.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace intdc {

enum class Experiment { fig2a, fig2b, fig2c, fig2d_g, fig3, fig4 };

Experiment parse_experiment(const std::string& name);
std::string to_string(Experiment e);

struct ExperimentConfig {
    Experiment experiment = Experiment::fig2a;
    int trials = 0;  // 0 selects the experiment's default
    std::uint64_t master_seed = 1;
    std::vector<Method> methods;  // empty selects the experiment's default
    std::optional<int> lag, k_outer, k_inner;
    std::optional<Eigen::Index> n;
    std::vector<double> grid;  // replaces the swept coupling values
    std::string out_dir;       // empty: nothing is written
    int jobs = 1;

    // Fills defaults and checks invariants.
    ExperimentConfig resolved() const;

    // Everything that determines the output; jobs and out_dir are left out.
    nlohmann::json to_json() const;
    static ExperimentConfig from_json(const nlohmann::json& j);
};

// Trial seed shared by every parameter point of an experiment.
std::uint64_t trial_seed(std::uint64_t master_seed, int trial);

struct SummaryRow {
    std::string point;      // e.g. "beta_yx=0.05"
    std::string method;
    std::string direction;  // e.g. "y->x"
    int count = 0;
    double mean = 0.0, std = 0.0, median = 0.0;
};

struct ExperimentResult {
    ExperimentConfig config;  // resolved
    std::vector<SummaryRow> summary;
    nlohmann::json report;    // experiment-specific details

    // First row matching all three keys; throws UsageError when absent.
    const SummaryRow& row(const std::string& point, const std::string& method, const std::string& direction) const;
};

// Runs the pipeline (simulate, infer, aggregate, evaluate). When out_dir is
// set, writes config.json, summary.csv, report.json and per-trial data.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

std::string format_summary_csv(const std::vector<SummaryRow>& rows);

}  // namespace intdc
