#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "distctrl/measure.hpp"

namespace distctrl {

/// Functional of the form m -> psi(integral of the integrands against m),
/// with `outputs` components. `dpsi` returns the outputs x K Jacobian of psi
/// in row-major order. Both callbacks write into caller-provided buffers so
/// that hot loops can evaluate them without allocating.
struct MomentFunctional {
  std::vector<std::function<double(double)>> integrands;
  std::function<void(std::span<const double>, std::span<double>)> psi;
  std::function<void(std::span<const double>, std::span<double>)> dpsi;
  int outputs = 1;
  bool convex = false;

  int inner_dim() const { return static_cast<int>(integrands.size()); }

  /// Integrals of all integrands against m (the argument of psi).
  std::vector<double> moment_vector(const DiscreteMeasure& m) const;

  /// Integrands sampled on the lattice nodes, one row per integrand.
  std::vector<std::vector<double>> sampled_integrands(const Lattice& lat) const;
};

/// psi evaluated at the moment vector of m. Throws EvaluationError when the
/// result is non-finite.
std::vector<double> eval(const MomentFunctional& f, const DiscreteMeasure& m);

/// Evaluates psi at a precomputed moment vector (same contract as eval).
void eval_at_moments(const MomentFunctional& f, std::span<const double> moments,
                     std::span<double> out);

/// Node-sampled derivative representatives, one grid function per output
/// component; defined up to an additive constant.
std::vector<std::vector<double>> derivative_rep(const MomentFunctional& f,
                                                const DiscreteMeasure& m);

/// Representative of the Lagrangian derivative: DF(m,x) + <lambda, DG(m,x)>.
std::vector<double> lagrangian_rep(const MomentFunctional& cost,
                                   const MomentFunctional& constraint, const DiscreteMeasure& m,
                                   std::span<const double> lambda);

/// Augmented Lagrangian value F(m) + <lambda, G(m)+s> + (c/2)|G(m)+s|^2.
double aug_lagrangian(const MomentFunctional& cost, const MomentFunctional& constraint,
                      const DiscreteMeasure& m, std::span<const double> s,
                      std::span<const double> lambda, double c);

/// Representative of the augmented-Lagrangian derivative: the Lagrangian
/// representative with effective multiplier lambda + c*(G(m)+s).
std::vector<double> aug_lagrangian_rep(const MomentFunctional& cost,
                                       const MomentFunctional& constraint,
                                       const DiscreteMeasure& m, std::span<const double> s,
                                       std::span<const double> lambda, double c);

/// Slack gradient lambda + c*(G(m)+s).
std::vector<double> slack_gradient(const MomentFunctional& constraint, const DiscreteMeasure& m,
                                   std::span<const double> s, std::span<const double> lambda,
                                   double c);

/// F(m) = integral of f against m.
MomentFunctional linear_functional(std::function<double(double)> f, bool convex = true);

/// Constraint var(m) <= alpha, written as E[x^2] - E[x]^2 - alpha <= 0.
MomentFunctional variance_cap_constraint(double alpha);

/// Constraint E[exp(-x^2)] >= alpha, written as -E[exp(-x^2)] + alpha <= 0.
MomentFunctional expectation_floor_constraint(double alpha);

struct ProblemFunctionals {
  MomentFunctional cost;
  MomentFunctional constraint;
};

/// Looks up a named test problem ("variance_cap" or "expectation_floor"),
/// both with cost E[x]. Throws ConfigError for unknown names.
ProblemFunctionals make_problem_functionals(const std::string& name, double alpha);

}  // namespace distctrl
