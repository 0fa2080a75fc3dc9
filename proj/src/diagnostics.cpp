#include "distctrl/diagnostics.hpp"

#include <cmath>

namespace distctrl {

double vi_residual(const DiscreteMeasure& m_hat, std::span<const double> lambda,
                   const Problem& problem) {
  auto rep = lagrangian_rep(problem.cost, problem.constraint, m_hat, lambda);
  auto sol = solve_standard(rep, problem.initial, problem.stencils, problem.exec);
  return moment(m_hat, rep) - sol.value;
}

std::vector<double> complementarity_check(std::span<const double> g_values,
                                          std::span<const double> lambda, double tol) {
  if (g_values.size() != lambda.size()) {
    throw ShapeError("constraint and multiplier lengths differ");
  }
  std::vector<double> defects(g_values.size(), 0.0);
  for (size_t i = 0; i < g_values.size(); ++i) {
    if (g_values[i] < -tol) defects[i] = std::abs(lambda[i]);
  }
  return defects;
}

namespace {

std::string gap_precondition_failure(const DiscreteMeasure& m_hat,
                                     std::span<const double> lambda, const Problem& problem,
                                     double tol) {
  if (!problem.cost.convex || !problem.constraint.convex) {
    return "functionals are not flagged convex";
  }
  for (double l : lambda) {
    if (l < -tol) return "multiplier has a negative component";
  }
  auto g = eval(problem.constraint, m_hat);
  for (double v : g) {
    if (v > tol) return "candidate is infeasible";
  }
  for (double d : complementarity_check(g, lambda, tol)) {
    if (d > tol) return "complementarity defect exceeds tolerance";
  }
  return {};
}

}  // namespace

double gap_bound(const DiscreteMeasure& m_hat, std::span<const double> lambda,
                 const Problem& problem, double tol) {
  const auto why = gap_precondition_failure(m_hat, lambda, problem, tol);
  if (!why.empty()) throw CertificateRefused(why);
  return vi_residual(m_hat, lambda, problem);
}

OptimalityCertificate make_certificate(const DiscreteMeasure& m_hat,
                                       std::span<const double> lambda, const Problem& problem,
                                       double tol) {
  OptimalityCertificate cert;
  cert.vi_residual = vi_residual(m_hat, lambda, problem);
  cert.constraint_values = eval(problem.constraint, m_hat);
  cert.multiplier.assign(lambda.begin(), lambda.end());
  cert.complementarity_defects = complementarity_check(cert.constraint_values, lambda, tol);
  const auto why = gap_precondition_failure(m_hat, lambda, problem, tol);
  if (why.empty()) cert.gap_bound = cert.vi_residual;
  else cert.gap_refusal = why;
  return cert;
}

}  // namespace distctrl
