#pragma once

#include <string>

#include "config.hpp"

namespace rsl::lab {

enum ExitCode : int {
  kOk = 0,
  kAssertionFailed = 1,
  kSolverFailure = 2,
  kConfigError = 3,
};

/// Run one experiment: writes deterministic artifacts (CSV traces, JSON
/// summaries, field snapshots, config echo) into cfg.output_dir and returns
/// the exit code (0 pass, 1 assertion failed, 2 solver non-convergence).
int run_experiment(const ExperimentConfig& cfg, int jobs = 1);

/// Aligned-time comparison of two run directories (invariants.csv and
/// trace.csv).  Writes a JSON report to stdout and `report_out` if non-null.
/// max_dev < 0 disables the pass/fail gate.
int compare_runs(const std::string& dir_a, const std::string& dir_b,
                 double max_dev, std::string* report_out = nullptr);

}  // namespace rsl::lab
