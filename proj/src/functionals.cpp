#include "distctrl/functionals.hpp"

#include <cmath>
#include <utility>

#include "distctrl/errors.hpp"

namespace distctrl {

std::vector<double> MomentFunctional::moment_vector(const DiscreteMeasure& m) const {
  std::vector<double> out(integrands.size());
  for (size_t k = 0; k < integrands.size(); ++k) out[k] = moment(m, integrands[k]);
  return out;
}

std::vector<std::vector<double>> MomentFunctional::sampled_integrands(const Lattice& lat) const {
  std::vector<std::vector<double>> out(integrands.size());
  for (size_t k = 0; k < integrands.size(); ++k) out[k] = sample_on_nodes(lat, integrands[k]);
  return out;
}

void eval_at_moments(const MomentFunctional& f, std::span<const double> moments,
                     std::span<double> out) {
  f.psi(moments, out);
  for (double v : out) {
    if (!std::isfinite(v)) throw EvaluationError("functional produced a non-finite value");
  }
}

std::vector<double> eval(const MomentFunctional& f, const DiscreteMeasure& m) {
  std::vector<double> out(f.outputs);
  eval_at_moments(f, f.moment_vector(m), out);
  return out;
}

std::vector<std::vector<double>> derivative_rep(const MomentFunctional& f,
                                                const DiscreteMeasure& m) {
  const Lattice& lat = m.lattice();
  const int k_dim = f.inner_dim();
  std::vector<double> jac(static_cast<size_t>(f.outputs) * k_dim);
  f.dpsi(f.moment_vector(m), jac);
  auto phi = f.sampled_integrands(lat);
  std::vector<std::vector<double>> reps(f.outputs, std::vector<double>(lat.nx, 0.0));
  for (int q = 0; q < f.outputs; ++q) {
    for (int k = 0; k < k_dim; ++k) {
      const double d = jac[static_cast<size_t>(q) * k_dim + k];
      if (d == 0.0) continue;
      for (int j = 0; j < lat.nx; ++j) reps[q][j] += d * phi[k][j];
    }
  }
  return reps;
}

namespace {

void check_scalar_cost(const MomentFunctional& cost) {
  if (cost.outputs != 1) throw ShapeError("cost functional must be scalar-valued");
}

std::vector<double> residual(const MomentFunctional& constraint, const DiscreteMeasure& m,
                             std::span<const double> s) {
  auto g = eval(constraint, m);
  if (s.size() != g.size()) throw ShapeError("slack length does not match constraint count");
  for (size_t i = 0; i < g.size(); ++i) g[i] += s[i];
  return g;
}

}  // namespace

std::vector<double> lagrangian_rep(const MomentFunctional& cost,
                                   const MomentFunctional& constraint, const DiscreteMeasure& m,
                                   std::span<const double> lambda) {
  check_scalar_cost(cost);
  if (static_cast<int>(lambda.size()) != constraint.outputs) {
    throw ShapeError("multiplier length does not match constraint count");
  }
  auto rep = derivative_rep(cost, m)[0];
  auto g_reps = derivative_rep(constraint, m);
  for (size_t i = 0; i < lambda.size(); ++i) {
    if (lambda[i] == 0.0) continue;
    for (size_t j = 0; j < rep.size(); ++j) rep[j] += lambda[i] * g_reps[i][j];
  }
  return rep;
}

double aug_lagrangian(const MomentFunctional& cost, const MomentFunctional& constraint,
                      const DiscreteMeasure& m, std::span<const double> s,
                      std::span<const double> lambda, double c) {
  check_scalar_cost(cost);
  if (c <= 0.0) throw std::invalid_argument("penalty parameter must be positive");
  const auto r = residual(constraint, m, s);
  double out = eval(cost, m)[0];
  for (size_t i = 0; i < r.size(); ++i) out += lambda[i] * r[i] + 0.5 * c * r[i] * r[i];
  return out;
}

std::vector<double> aug_lagrangian_rep(const MomentFunctional& cost,
                                       const MomentFunctional& constraint,
                                       const DiscreteMeasure& m, std::span<const double> s,
                                       std::span<const double> lambda, double c) {
  const auto r = residual(constraint, m, s);
  std::vector<double> effective(lambda.begin(), lambda.end());
  for (size_t i = 0; i < r.size(); ++i) effective[i] += c * r[i];
  return lagrangian_rep(cost, constraint, m, effective);
}

std::vector<double> slack_gradient(const MomentFunctional& constraint, const DiscreteMeasure& m,
                                   std::span<const double> s, std::span<const double> lambda,
                                   double c) {
  auto r = residual(constraint, m, s);
  for (size_t i = 0; i < r.size(); ++i) r[i] = lambda[i] + c * r[i];
  return r;
}

MomentFunctional linear_functional(std::function<double(double)> f, bool convex) {
  MomentFunctional out;
  out.integrands.push_back(std::move(f));
  out.psi = [](std::span<const double> mom, std::span<double> val) { val[0] = mom[0]; };
  out.dpsi = [](std::span<const double>, std::span<double> jac) { jac[0] = 1.0; };
  out.outputs = 1;
  out.convex = convex;
  return out;
}

MomentFunctional variance_cap_constraint(double alpha) {
  MomentFunctional g;
  g.integrands.push_back([](double x) { return x; });
  g.integrands.push_back([](double x) { return x * x; });
  g.psi = [alpha](std::span<const double> mom, std::span<double> val) {
    val[0] = mom[1] - mom[0] * mom[0] - alpha;
  };
  g.dpsi = [](std::span<const double> mom, std::span<double> jac) {
    jac[0] = -2.0 * mom[0];
    jac[1] = 1.0;
  };
  g.outputs = 1;
  g.convex = true;
  return g;
}

MomentFunctional expectation_floor_constraint(double alpha) {
  MomentFunctional g;
  g.integrands.push_back([](double x) { return -std::exp(-x * x); });
  g.psi = [alpha](std::span<const double> mom, std::span<double> val) { val[0] = mom[0] + alpha; };
  g.dpsi = [](std::span<const double>, std::span<double> jac) { jac[0] = 1.0; };
  g.outputs = 1;
  g.convex = true;
  return g;
}

ProblemFunctionals make_problem_functionals(const std::string& name, double alpha) {
  MomentFunctional cost = linear_functional([](double x) { return x; });
  if (name == "variance_cap") return {std::move(cost), variance_cap_constraint(alpha)};
  if (name == "expectation_floor") return {std::move(cost), expectation_floor_constraint(alpha)};
  throw ConfigError("unknown problem '" + name + "'");
}

}  // namespace distctrl
