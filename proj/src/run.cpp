#include "distctrl/run.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "distctrl/io.hpp"

namespace distctrl {

namespace {

std::ofstream open_out(const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw std::ios_base::failure("cannot open " + file.string() + " for writing");
  return out;
}

}  // namespace

Dynamics drift_controlled_dynamics() {
  Dynamics dyn;
  dyn.drift = [](double, double u) { return u; };
  dyn.volatility = [](double, double) { return 1.0; };
  return dyn;
}

Problem build_problem(const RunConfig& cfg) {
  cfg.validate();
  auto lattice = std::make_shared<const Lattice>(Lattice::make(
      cfg.x_min, cfg.x_max, cfg.dx, cfg.dt, cfg.horizon, cfg.u_min, cfg.u_max, cfg.du));
  auto stencils = build_stencils(lattice, drift_controlled_dynamics());
  auto fns = make_problem_functionals(cfg.problem, cfg.alpha);
  auto m0 = dirac(lattice, cfg.x0);
  return Problem{std::move(stencils), std::move(fns.cost), std::move(fns.constraint),
                 std::move(m0)};
}

RunResult execute_run(const RunConfig& cfg, const Problem& problem) {
  auto report = outer_loop(problem, alm_config(cfg));
  auto certificate =
      make_certificate(report.m_bar, report.lambda_bar, problem, cfg.tolerance);
  return RunResult{std::move(report), std::move(certificate)};
}

RunResult execute_run(const RunConfig& cfg) {
  const Problem problem = build_problem(cfg);
  return execute_run(cfg, problem);
}

namespace {

void write_convergence_csv(const RunConfig& cfg, const RunResult& r, std::ostream& out) {
  out << "tolerance,g_ubar,lambda_bar,vi_residual,c_final,standard_problems,converged\n";
  out << format_double(cfg.tolerance) << ',';
  for (size_t i = 0; i < r.report.g_ubar.size(); ++i) {
    if (i) out << ';';
    out << format_double(r.report.g_ubar[i]);
  }
  out << ',';
  for (size_t i = 0; i < r.report.lambda_bar.size(); ++i) {
    if (i) out << ';';
    out << format_double(r.report.lambda_bar[i]);
  }
  out << ',' << format_double(r.report.vi_residual) << ',' << format_double(r.report.c_final)
      << ',' << r.report.standard_problems << ',' << (r.report.converged ? 1 : 0) << '\n';
}

void write_control_csv(const RunConfig&, const OuterReport& rep, const Lattice& lat,
                       std::ostream& out) {
  std::vector<double> row(lat.nx);
  for (int t = 0; t < rep.feedback.nt; ++t) {
    for (int j = 0; j < lat.nx; ++j) row[j] = rep.feedback.value(lat, t, j);
    write_csv_row(out, row);
  }
}

void write_value_csv(const OuterReport& rep, std::ostream& out) {
  for (int t = 0; t <= rep.adjoint.nt; ++t) write_csv_row(out, rep.adjoint.slice(t));
}

void write_distribution_csv(const OuterReport& rep, std::ostream& out) {
  for (const auto& slice : rep.flow) write_csv_row(out, slice.weights());
}

void write_outer_trace_csv(const OuterReport& rep, std::ostream& out) {
  out << "k,residual_norm,epsilon,c,eta,omega,lambda,multiplier_updated,inner_steps,"
         "standard_solves\n";
  for (const auto& row : rep.outer_trace) {
    out << row.k << ',' << format_double(row.residual_norm) << ',' << format_double(row.epsilon)
        << ',' << format_double(row.c) << ',' << format_double(row.eta) << ','
        << format_double(row.omega) << ',';
    for (size_t i = 0; i < row.lambda.size(); ++i) {
      if (i) out << ';';
      out << format_double(row.lambda[i]);
    }
    out << ',' << (row.multiplier_updated ? 1 : 0) << ',' << row.inner_steps << ','
        << row.standard_solves << '\n';
  }
}

nlohmann::json certificate_json(const OptimalityCertificate& cert) {
  nlohmann::json j;
  j["vi_residual"] = cert.vi_residual;
  j["constraint_values"] = cert.constraint_values;
  j["multiplier"] = cert.multiplier;
  j["complementarity_defects"] = cert.complementarity_defects;
  if (cert.gap_bound) j["gap_bound"] = *cert.gap_bound;
  else j["gap_bound"] = nullptr;
  if (!cert.gap_refusal.empty()) j["gap_refusal"] = cert.gap_refusal;
  return j;
}

}  // namespace

void write_run_artifacts(const RunConfig& cfg, const RunResult& result,
                         const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const Lattice& lat = result.report.m_bar.lattice();
  {
    auto out = open_out(dir / "convergence.csv");
    write_convergence_csv(cfg, result, out);
  }
  {
    auto out = open_out(dir / "control.csv");
    write_control_csv(cfg, result.report, lat, out);
  }
  {
    auto out = open_out(dir / "value.csv");
    write_value_csv(result.report, out);
  }
  {
    auto out = open_out(dir / "distribution.csv");
    write_distribution_csv(result.report, out);
  }
  {
    auto out = open_out(dir / "final_distribution.csv");
    write_csv(result.report.m_bar, out);
  }
  {
    auto out = open_out(dir / "outer_trace.csv");
    write_outer_trace_csv(result.report, out);
  }

  nlohmann::json j;
  j["problem"] = cfg.problem;
  j["alpha"] = cfg.alpha;
  j["grid"] = {{"x_min", cfg.x_min}, {"x_max", cfg.x_max}, {"dx", cfg.dx},   {"dt", cfg.dt},
               {"T", cfg.horizon},   {"u_min", cfg.u_min}, {"u_max", cfg.u_max}, {"du", cfg.du}};
  j["x0"] = cfg.x0;
  j["tolerance"] = cfg.tolerance;
  j["seed"] = cfg.seed;
  j["converged"] = result.report.converged;
  if (!result.report.failure.empty()) j["failure"] = result.report.failure;
  j["lambda_bar"] = result.report.lambda_bar;
  j["g_ubar"] = result.report.g_ubar;
  j["vi_residual"] = result.report.vi_residual;
  j["c_final"] = result.report.c_final;
  j["residual_norm_final"] = result.report.residual_norm_final;
  j["epsilon_final"] = result.report.epsilon_final;
  j["slack_final"] = result.report.s_final;
  j["outer_iterations"] = result.report.outer_iterations;
  j["standard_problems"] = result.report.standard_problems;
  j["certificate"] = certificate_json(result.certificate);
  auto out = open_out(dir / "summary.json");
  out << j.dump(2) << '\n';
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& file) {
  auto out = open_out(file);
  out << "tolerance,g_ubar,lambda_bar,vi_residual,c_final,standard_problems,converged\n";
  for (const auto& r : rows) {
    out << format_double(r.tolerance) << ',';
    for (size_t i = 0; i < r.g_ubar.size(); ++i) {
      if (i) out << ';';
      out << format_double(r.g_ubar[i]);
    }
    out << ',';
    for (size_t i = 0; i < r.lambda_bar.size(); ++i) {
      if (i) out << ';';
      out << format_double(r.lambda_bar[i]);
    }
    out << ',' << format_double(r.vi_residual) << ',' << format_double(r.c_final) << ','
        << r.standard_problems << ',' << (r.converged ? 1 : 0) << '\n';
  }
}

double loglog_slope(const std::vector<ConvexityDemoRow>& rows) {
  const size_t n = rows.size();
  if (n < 2) throw std::invalid_argument("slope needs at least two points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& r : rows) {
    const double x = std::log(r.eps);
    const double y = std::log(r.d1);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double nn = static_cast<double>(n);
  return (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
}

void write_convexity_csv(const std::vector<ConvexityDemoRow>& rows,
                         const std::filesystem::path& file) {
  auto out = open_out(file);
  out << "eps,d1_mixture\n";
  for (const auto& r : rows) {
    out << format_double(r.eps) << ',' << format_double(r.d1) << '\n';
  }
}

}  // namespace distctrl
