#pragma once

#include <string>
#include <vector>

#include "sjkf/analysis.hpp"
#include "sjkf/config.hpp"
#include "sjkf/prior.hpp"
#include "sjkf/srukf.hpp"

namespace sjkf {

// Header row, comma separator, '.' decimal point, 17 significant digits.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Matrix& columns);

struct CsvTable {
    std::vector<std::string> header;
    Matrix data; // one row per record, one column per header entry

    int col(const std::string& name) const;     // -1 when absent
    int require(const std::string& name) const; // throws ConfigError
};

CsvTable read_csv(const std::string& path);

Trajectory simulate_from_config(const ExperimentConfig& cfg);

struct ObserverRun {
    ObserverKind kind = ObserverKind::joint;
    EstimateLog log;
    FilterDiagnostics diagnostics;
    SigmaStarResult sigma_star2; // zeroed for the classical observer
    double wall_seconds = 0.0;
};

// Runs one observer over a prebuilt measurement stream.
ObserverRun run_observer(const ExperimentConfig& cfg, ObserverKind kind,
                         const Trajectory& truth);

struct ExperimentResult {
    Trajectory truth;
    std::vector<ObserverRun> runs;
    std::vector<std::string> files;
};

// Simulates once per seed, runs the observers on the identical measurement
// stream, and writes states_true.csv, states_est_<observer>.csv, theta.csv
// (theta_<observer>.csv when several runs carry parameters), error.csv and
// report.txt into cfg.output_dir. Observers default to {cfg.observer}.
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                std::vector<ObserverKind> observers = {});

struct ComparisonRow {
    std::string observer;
    double final_cumulative_error = 0.0;
    Vector rmse;             // per state, post burn-in
    int sparsity_count = -1; // -1 when the observer carries no parameters
    double wall_seconds = 0.0;
};

// Runs the observers in parallel, each on its own copy of one shared
// measurement stream; rows come back sorted by observer name. The metric
// fields are deterministic; wall_seconds is not.
std::vector<ComparisonRow> compare_observers(const ExperimentConfig& cfg,
                                             const std::vector<ObserverKind>& observers);

// Number of parameters whose time-averaged |theta_i| past burn_in exceeds
// rel_threshold times the largest such average.
int sparsity_count(const EstimateLog& log, double burn_in, double rel_threshold = 0.1);

// Per-state sqrt(mean (x_true - x_est)^2) over times >= burn_in.
Vector state_rmse(const EstimateLog& log, double burn_in);

std::string format_comparison(const std::vector<ComparisonRow>& rows);

// Human-readable run summary plus the effective configuration echo.
std::string experiment_report(const ExperimentConfig& cfg, const ExperimentResult& res);

} // namespace sjkf
