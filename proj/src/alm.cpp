#include "distctrl/alm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "distctrl/diagnostics.hpp"

namespace distctrl {

void AlmConfig::validate() const {
  if (!(eta_star > 0.0) || !(omega_star > 0.0)) throw ConfigError("tolerances must be positive");
  if (!(c0 >= 1.0)) throw ConfigError("initial penalty must be at least 1");
  if (!(penalty_growth > 1.0)) throw ConfigError("penalty growth must exceed 1");
  if (!(eta_exponent > 0.0)) throw ConfigError("eta exponent must be positive");
  if (max_outer < 1 || max_inner < 1) throw ConfigError("iteration caps must be at least 1");
  const double n = std::round(1.0 / dtheta);
  if (!(dtheta > 0.0) || n < 1.0 || std::abs(n * dtheta - 1.0) > 1e-9) {
    throw ConfigError("dtheta must divide [0,1] into an integer grid");
  }
}

namespace {

double euclid(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

LinearizedStep linearized_step(const DiscreteMeasure& m, std::span<const double> s,
                               std::span<const double> lambda, double c, const Problem& problem) {
  auto rep = aug_lagrangian_rep(problem.cost, problem.constraint, m, s, lambda, c);
  auto sol = solve_standard(rep, problem.initial, problem.stencils, problem.exec);
  const double gap = sol.value - moment(m, rep);
  return LinearizedStep{std::move(sol.terminal), gap, sol.value};
}

double line_search(const DiscreteMeasure& m, const DiscreteMeasure& m_tilde,
                   std::span<const double> s, std::span<const double> ds,
                   std::span<const double> lambda, double c, const Problem& problem,
                   double dtheta) {
  const long n_theta = std::llround(1.0 / dtheta);
  if (n_theta < 1 || std::abs(static_cast<double>(n_theta) * dtheta - 1.0) > 1e-9) {
    throw ConfigError("dtheta must divide [0,1] into an integer grid");
  }
  const MomentFunctional& cost = problem.cost;
  const MomentFunctional& con = problem.constraint;
  const auto mf0 = cost.moment_vector(m);
  const auto mf1 = cost.moment_vector(m_tilde);
  const auto mg0 = con.moment_vector(m);
  const auto mg1 = con.moment_vector(m_tilde);
  const int kf = cost.inner_dim();
  const int kg = con.inner_dim();
  const int nc = con.outputs;

  // Fixed chunking keeps the scan deterministic for any thread count; the
  // chunk minima are merged in ascending-theta order below.
  const long n_points = n_theta + 1;
  const int n_chunks = static_cast<int>(std::min<long>(256, n_points));
  std::vector<double> chunk_best(n_chunks);
  std::vector<double> chunk_theta(n_chunks);

#pragma omp parallel for schedule(static)
  for (int chunk = 0; chunk < n_chunks; ++chunk) {
    const long begin = chunk * n_points / n_chunks;
    const long end = (chunk + 1) * n_points / n_chunks;
    std::vector<double> bf(kf), bg(kg), fval(1), gval(nc);
    double best = std::numeric_limits<double>::infinity();
    double best_theta = 0.0;
    for (long i = begin; i < end; ++i) {
      const double theta = (i == n_theta) ? 1.0 : static_cast<double>(i) * dtheta;
      const double a = 1.0 - theta;
      for (int k = 0; k < kf; ++k) bf[k] = a * mf0[k] + theta * mf1[k];
      cost.psi(bf, fval);
      for (int k = 0; k < kg; ++k) bg[k] = a * mg0[k] + theta * mg1[k];
      con.psi(bg, gval);
      double value = fval[0];
      for (int i_c = 0; i_c < nc; ++i_c) {
        const double si = std::max(s[i_c] + theta * ds[i_c], 0.0);
        const double r = gval[i_c] + si;
        value += lambda[i_c] * r + 0.5 * c * r * r;
      }
      if (value < best) {
        best = value;
        best_theta = theta;
      }
    }
    chunk_best[chunk] = best;
    chunk_theta[chunk] = best_theta;
  }

  double best = std::numeric_limits<double>::infinity();
  double best_theta = 0.0;
  for (int chunk = 0; chunk < n_chunks; ++chunk) {
    if (chunk_best[chunk] < best) {
      best = chunk_best[chunk];
      best_theta = chunk_theta[chunk];
    }
  }
  return best_theta;
}

InnerResult inner_loop(const DiscreteMeasure& m0, std::span<const double> s0,
                       std::span<const double> lambda, double c, double omega,
                       const Problem& problem, const AlmConfig& config) {
  if (!(c > 0.0) || !(omega > 0.0)) throw std::invalid_argument("c and omega must be positive");
  for (double v : s0) {
    if (!(v >= 0.0)) throw std::invalid_argument("slack must be non-negative");
  }

  InnerResult res{m0, std::vector<double>(s0.begin(), s0.end())};
  const int nc = problem.n_constraints();
  std::vector<double> ds(nc);

  for (int iter = 0; iter < config.max_inner; ++iter) {
    auto step = linearized_step(res.m, res.s, lambda, c, problem);
    ++res.standard_solves;

    auto sg = slack_gradient(problem.constraint, res.m, res.s, lambda, c);
    double eps_slack = 0.0;
    for (int i = 0; i < nc; ++i) {
      ds[i] = -sg[i];
      eps_slack = std::max(eps_slack, std::abs(res.s[i] - std::max(res.s[i] + ds[i], 0.0)));
    }
    res.epsilon = std::max(-step.gap, eps_slack);

    const double la = aug_lagrangian(problem.cost, problem.constraint, res.m, res.s, lambda, c);
    if (res.epsilon <= omega) {
      res.trace.push_back({la, res.epsilon, 0.0});
      res.converged = true;
      return res;
    }

    const double theta =
        line_search(res.m, step.m_tilde, res.s, ds, lambda, c, problem, config.dtheta);
    res.trace.push_back({la, res.epsilon, theta});
    if (theta == 0.0) {
      // A zero step leaves the iterate unchanged and the loop would spin.
      res.failure = "line search found no descent on the theta grid";
      return res;
    }
    res.m = mixture(res.m, step.m_tilde, theta);
    for (int i = 0; i < nc; ++i) res.s[i] = std::max(res.s[i] + theta * ds[i], 0.0);
    ++res.steps;
  }
  res.failure = "inner iteration cap reached";
  return res;
}

OuterReport outer_loop(const Problem& problem, const AlmConfig& config) {
  config.validate();
  const int nc = problem.n_constraints();

  AlmState st{problem.initial,
              std::vector<double>(nc, 0.0),
              std::vector<double>(nc, 0.0),
              config.c0,
              std::pow(config.c0, -config.eta_exponent),
              1.0 / config.c0,
              0};

  bool converged = false;
  std::string failure;
  int solves = 0;
  double eps_final = 0.0;
  double rnorm_final = 0.0;
  std::vector<OuterRow> rows;
  std::vector<std::vector<InnerTraceRow>> traces;

  while (st.k < config.max_outer) {
    auto inner = inner_loop(st.m, st.s, st.lambda, st.c, st.omega, problem, config);
    solves += inner.standard_solves;
    traces.push_back(std::move(inner.trace));

    st.m = std::move(inner.m);
    st.s = std::move(inner.s);

    auto g = eval(problem.constraint, st.m);
    std::vector<double> r(nc);
    for (int i = 0; i < nc; ++i) r[i] = g[i] + st.s[i];
    const double rnorm = euclid(r);

    OuterRow row;
    row.k = st.k;
    row.residual_norm = rnorm;
    row.epsilon = inner.epsilon;
    row.c = st.c;
    row.eta = st.eta;
    row.omega = st.omega;
    row.inner_steps = inner.steps;
    row.standard_solves = inner.standard_solves;
    eps_final = inner.epsilon;
    rnorm_final = rnorm;

    if (!inner.converged) {
      row.lambda = st.lambda;
      rows.push_back(std::move(row));
      ++st.k;
      failure = "inner loop failed: " + inner.failure;
      break;
    }

    if (rnorm <= st.eta) {
      for (int i = 0; i < nc; ++i) st.lambda[i] += st.c * r[i];
      row.multiplier_updated = true;
      row.lambda = st.lambda;
      rows.push_back(std::move(row));
      if (rnorm <= config.eta_star && inner.epsilon <= config.omega_star) {
        ++st.k;
        converged = true;
        break;
      }
      if (rnorm <= st.omega) {
        st.eta /= std::pow(config.penalty_growth, config.eta_exponent);
        st.omega /= config.penalty_growth;
      } else {
        // Residual cleared eta but not omega: the penalty is considered too
        // weak and is strengthened alongside the multiplier update.
        st.c *= config.penalty_growth;
        st.eta = std::pow(st.c, -config.eta_exponent);
        st.omega = 1.0 / st.c;
      }
    } else {
      row.lambda = st.lambda;
      rows.push_back(std::move(row));
      st.c *= config.penalty_growth;
      st.eta = std::pow(st.c, -config.eta_exponent);
      st.omega = 1.0 / st.c;
    }
    ++st.k;
  }
  if (!converged && failure.empty()) failure = "outer iteration cap reached";

  // Recover a feedback control from the final iterate and multiplier.
  auto rep = lagrangian_rep(problem.cost, problem.constraint, st.m, st.lambda);
  auto sol = solve_standard(rep, problem.initial, problem.stencils, problem.exec);
  ++solves;

  OuterReport report{
      converged,
      failure,
      st.lambda,
      std::move(sol.feedback),
      std::move(sol.values),
      std::move(sol.flow),
      std::move(sol.terminal),
      {},
      rnorm_final,
      eps_final,
      st.s,
      0.0,
      st.c,
      st.k,
      solves,
      std::move(rows),
      std::move(traces)};
  report.g_ubar = eval(problem.constraint, report.m_bar);
  report.vi_residual = vi_residual(report.m_bar, report.lambda_bar, problem);
  return report;
}

}  // namespace distctrl
