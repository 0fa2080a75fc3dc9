#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "distctrl/problem.hpp"

namespace distctrl {

/// KKT-style certificate for a candidate final-time distribution.
struct OptimalityCertificate {
  double vi_residual = 0.0;
  std::vector<double> constraint_values;
  std::vector<double> multiplier;
  std::vector<double> complementarity_defects;
  std::optional<double> gap_bound;  // convex case only
  std::string gap_refusal;          // why gap_bound is absent
};

/// Variational-inequality residual: moment(m_hat, rep) minus the standard
/// value of rep over the reachable set, rep being the Lagrangian derivative
/// representative at m_hat. Non-negative when m_hat is reachable.
double vi_residual(const DiscreteMeasure& m_hat, std::span<const double> lambda,
                   const Problem& problem);

/// Certified upper bound on the optimality gap in the convex case; refuses
/// (throws CertificateRefused) when convexity flags, multiplier signs,
/// complementarity, or feasibility cannot be verified within tol.
double gap_bound(const DiscreteMeasure& m_hat, std::span<const double> lambda,
                 const Problem& problem, double tol);

/// Complementarity defects: |lambda_i| where G_i < -tol, else 0.
std::vector<double> complementarity_check(std::span<const double> g_values,
                                          std::span<const double> lambda, double tol);

/// Assembles the full certificate; gap_bound is filled when its
/// preconditions hold and the refusal reason recorded otherwise.
OptimalityCertificate make_certificate(const DiscreteMeasure& m_hat,
                                       std::span<const double> lambda, const Problem& problem,
                                       double tol);

}  // namespace distctrl
