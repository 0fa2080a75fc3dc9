#pragma once

#include <span>
#include <string>
#include <vector>

#include "distctrl/problem.hpp"

namespace distctrl {

struct AlmConfig {
  double eta_star = 1e-3;   // constraint-residual stopping tolerance
  double omega_star = 1e-3; // criticality stopping tolerance
  double c0 = 10.0;
  double penalty_growth = 10.0;
  double eta_exponent = 0.1;  // eta schedule: eta_0 = c0^-0.1, tightened by growth^-0.1
  int max_outer = 100;
  int max_inner = 5000;
  double dtheta = 1e-6;  // line-search grid resolution on [0,1]

  void validate() const;
};

/// Outer-loop iterate (measure, slack, multiplier, penalty, tolerances).
struct AlmState {
  DiscreteMeasure m;
  std::vector<double> s;
  std::vector<double> lambda;
  double c = 0.0;
  double eta = 0.0;
  double omega = 0.0;
  int k = 0;
};

struct InnerTraceRow {
  double aug_lagrangian;  // value at the iterate before stepping
  double epsilon;
  double theta;  // step taken from this iterate (0 on the terminal row)
};

/// Result of the projected-gradient inner loop.
struct InnerResult {
  DiscreteMeasure m;
  std::vector<double> s;
  double epsilon = 0.0;
  int steps = 0;             // accepted line-search steps
  int standard_solves = 0;   // standard problems solved (one per loop entry)
  bool converged = false;
  std::string failure;       // set when converged == false
  std::vector<InnerTraceRow> trace;
};

/// Linearized subproblem: minimizes the derivative representative of the
/// augmented Lagrangian over the reachable set via one standard solve.
struct LinearizedStep {
  DiscreteMeasure m_tilde;
  double gap = 0.0;    // standard value minus moment(m, rep); <= 0 up to noise
  double value = 0.0;  // value of the standard problem
};

LinearizedStep linearized_step(const DiscreteMeasure& m, std::span<const double> s,
                               std::span<const double> lambda, double c, const Problem& problem);

/// Grid line search over theta in {0, dtheta, ..., 1} minimizing the
/// augmented Lagrangian along (mixture(m, m_tilde, theta), max(s+theta*ds,0));
/// ties resolve to the smallest theta. Moment vectors are affine in theta, so
/// each grid point costs O(K+N).
double line_search(const DiscreteMeasure& m, const DiscreteMeasure& m_tilde,
                   std::span<const double> s, std::span<const double> ds,
                   std::span<const double> lambda, double c, const Problem& problem,
                   double dtheta);

/// Projected-gradient minimization of the augmented Lagrangian over the
/// reachable set and the non-negative slacks, to criticality omega.
InnerResult inner_loop(const DiscreteMeasure& m0, std::span<const double> s0,
                       std::span<const double> lambda, double c, double omega,
                       const Problem& problem, const AlmConfig& config);

struct OuterRow {
  int k = 0;
  double residual_norm = 0.0;  // |G(m)+s|
  double epsilon = 0.0;
  double c = 0.0;
  double eta = 0.0;
  double omega = 0.0;
  std::vector<double> lambda;  // after the multiplier update of this iteration
  bool multiplier_updated = false;
  int inner_steps = 0;
  int standard_solves = 0;
};

/// Full report of one augmented-Lagrangian run.
struct OuterReport {
  bool converged = false;
  std::string failure;

  std::vector<double> lambda_bar;
  ControlField feedback;
  ValueField adjoint;
  std::vector<DiscreteMeasure> flow;  // distribution under the final feedback
  DiscreteMeasure m_bar;              // final-time distribution of the feedback
  std::vector<double> g_ubar;         // G(m_bar)
  double residual_norm_final = 0.0;   // |G+s| at the last inner iterate
  double epsilon_final = 0.0;
  std::vector<double> s_final;
  double vi_residual = 0.0;
  double c_final = 0.0;
  int outer_iterations = 0;
  int standard_problems = 0;  // solves performed by the algorithm itself
  std::vector<OuterRow> outer_trace;
  std::vector<std::vector<InnerTraceRow>> inner_traces;
};

/// Augmented-Lagrangian outer loop with multiplier updates and
/// penalty/tolerance schedules, followed by the final standard solve that
/// recovers a feedback control.
OuterReport outer_loop(const Problem& problem, const AlmConfig& config);

}  // namespace distctrl
