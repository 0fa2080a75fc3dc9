#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "distctrl/config.hpp"
#include "distctrl/diagnostics.hpp"
#include "distctrl/problem.hpp"

namespace distctrl {

/// The SDE controlled in drift with unit volatility, the dynamics behind all
/// shipped problems.
Dynamics drift_controlled_dynamics();

/// Discretizes the configured problem (lattice, stencils, functionals,
/// initial point mass).
Problem build_problem(const RunConfig& cfg);

struct RunResult {
  OuterReport report;
  OptimalityCertificate certificate;
};

/// Runs the augmented-Lagrangian solver on the configured problem.
RunResult execute_run(const RunConfig& cfg, const Problem& problem);
RunResult execute_run(const RunConfig& cfg);

/// Writes the artifact set for one run into dir: convergence.csv,
/// control.csv, value.csv, distribution.csv, final_distribution.csv,
/// outer_trace.csv, summary.json. Throws std::ios_base::failure on I/O
/// problems. Partial results of non-converged runs are written the same way.
void write_run_artifacts(const RunConfig& cfg, const RunResult& result,
                         const std::filesystem::path& dir);

/// One row of the aggregated sweep table.
struct SweepRow {
  double tolerance = 0.0;
  bool converged = false;
  std::vector<double> g_ubar;
  std::vector<double> lambda_bar;
  double vi_residual = 0.0;
  double c_final = 0.0;
  int standard_problems = 0;
};

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& file);

struct ConvexityDemoRow {
  double eps = 0.0;
  double d1 = 0.0;
};

/// Least-squares slope of log d1 against log eps.
double loglog_slope(const std::vector<ConvexityDemoRow>& rows);

void write_convexity_csv(const std::vector<ConvexityDemoRow>& rows,
                         const std::filesystem::path& file);

}  // namespace distctrl
