// Acceptance suite: one pass/fail line per criterion, non-zero exit on any
// failure. Criteria 1-5 run the production grid (dx=1e-3, du=0.1) and take
// minutes in total; 6-8 are seconds-scale.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "distctrl/alm.hpp"
#include "distctrl/run.hpp"
#include "distctrl/simulate.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace distctrl;
namespace fs = std::filesystem;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

RunConfig production_config(const std::string& problem, double alpha, double tolerance) {
  RunConfig cfg;
  cfg.problem = problem;
  cfg.alpha = alpha;
  cfg.tolerance = tolerance;
  apply_full_grid(cfg);
  return cfg;
}

struct NamedRun {
  RunConfig cfg;
  Problem problem;
  OuterReport report;
};

NamedRun run_production(const std::string& problem, double alpha, double tolerance) {
  RunConfig cfg = production_config(problem, alpha, tolerance);
  Problem p = build_problem(cfg);
  auto report = outer_loop(p, alm_config(cfg));
  return NamedRun{std::move(cfg), std::move(p), std::move(report)};
}

Check criterion_tc1(const NamedRun& run) {
  Check c;
  const auto& r = run.report;
  c.require(r.converged, "did not converge: " + r.failure);
  c.require(r.lambda_bar[0] >= 1.27 && r.lambda_bar[0] <= 1.38,
            "lambda_bar=" + fmt(r.lambda_bar[0]) + " outside [1.27,1.38]");
  c.require(std::abs(r.g_ubar[0]) <= 1e-3, "|G(ubar)|=" + fmt(std::abs(r.g_ubar[0])) + " > 1e-3");
  c.require(r.vi_residual <= 1e-6, "vi_residual=" + fmt(r.vi_residual) + " > 1e-6");
  c.require(r.c_final == 100.0 || r.c_final == 1000.0, "c_final=" + fmt(r.c_final));
  return c;
}

Check criterion_tc2(const NamedRun& run) {
  Check c;
  const auto& r = run.report;
  c.require(r.converged, "did not converge: " + r.failure);
  c.require(r.lambda_bar[0] >= 3.90 && r.lambda_bar[0] <= 4.15,
            "lambda_bar=" + fmt(r.lambda_bar[0]) + " outside [3.90,4.15]");
  c.require(std::abs(r.g_ubar[0]) <= 1e-3, "|G(ubar)|=" + fmt(std::abs(r.g_ubar[0])) + " > 1e-3");
  c.require(r.vi_residual <= 1e-9, "vi_residual=" + fmt(r.vi_residual) + " > 1e-9");
  return c;
}

Check criterion_control_structure(const NamedRun& run) {
  Check c;
  const auto& lat = run.problem.lattice();
  const auto& fb = run.report.feedback;

  int64_t extreme = 0;
  for (int t = 0; t < fb.nt; ++t) {
    for (int j = 0; j < fb.nx; ++j) {
      const double u = fb.value(lat, t, j);
      if (u == -2.0 || u == 2.0) ++extreme;
    }
  }
  const double frac =
      static_cast<double>(extreme) / (static_cast<double>(fb.nt) * static_cast<double>(fb.nx));
  c.require(frac >= 0.90, "bang-bang fraction " + fmt(frac) + " < 0.90");

  // Switching location at t=0: last node (from the left) still pushing up.
  int last_up = -1;
  for (int j = 0; j < fb.nx; ++j) {
    if (fb.value(lat, 0, j) == 2.0) last_up = j;
  }
  c.require(last_up >= 0, "no upward control at t=0");
  if (last_up >= 0) {
    const double x_switch = lat.node(last_up);
    c.require(std::abs(x_switch - (-1.6)) <= 0.15,
              "switch at x=" + fmt(x_switch) + ", expected -1.6 +/- 0.15");
  }
  return c;
}

Check criterion_descent(const NamedRun& tc1, const NamedRun& tc2) {
  Check c;
  for (const NamedRun* run : {&tc1, &tc2}) {
    const auto& report = run->report;
    for (size_t k = 0; k < report.inner_traces.size(); ++k) {
      const auto& trace = report.inner_traces[k];
      const double omega = report.outer_trace[k].omega;
      for (size_t i = 0; i + 1 < trace.size(); ++i) {
        const auto& cur = trace[i];
        const auto& next = trace[i + 1];
        if (next.aug_lagrangian > cur.aug_lagrangian) {
          c.require(false, "L_A increased at outer " + std::to_string(k) + " inner " +
                               std::to_string(i) + " by " +
                               fmt(next.aug_lagrangian - cur.aug_lagrangian));
        }
        if (cur.epsilon > omega && !(next.aug_lagrangian < cur.aug_lagrangian)) {
          c.require(false, "no strict descent at outer " + std::to_string(k) + " inner " +
                               std::to_string(i));
        }
      }
    }
  }
  return c;
}

Check criterion_unconstrained(const NamedRun& run) {
  Check c;
  const auto& r = run.report;
  const auto& lat = run.problem.lattice();
  c.require(r.converged, "did not converge: " + r.failure);
  c.require(std::abs(r.lambda_bar[0]) <= run.cfg.tolerance + 1e-12,
            "lambda_bar=" + fmt(r.lambda_bar[0]) + " not ~0");

  const double reach = 2.0 * lat.dt + std::sqrt(lat.dt);
  bool all_down = true;
  for (int t = 0; t < r.feedback.nt && all_down; ++t) {
    for (int j = 0; j < lat.nx; ++j) {
      const double x = lat.node(j);
      if (x - lat.x_min > reach && lat.x_max - x > reach &&
          r.feedback.value(lat, t, j) != -2.0) {
        all_down = false;
        break;
      }
    }
  }
  c.require(all_down, "interior feedback is not uniformly -2");

  const double drifted_mean = run.cfg.x0 - 2.0 * lat.horizon();
  c.require(std::abs(r.m_bar.mean() - drifted_mean) <= 2.0 * lat.dx() + 1e-3,
            "mean(m_T)=" + fmt(r.m_bar.mean()) + ", chain value " + fmt(drifted_mean));
  return c;
}

Check criterion_oracles() {
  Check c;

  // (a) closed-form Wasserstein distance against the coupling LP.
  auto lat = testutil::grid(-3.0, 3.0, 0.5);
  std::mt19937_64 rng(424242);
  double worst_w1 = 0.0;
  for (int trial = 0; trial < 40; ++trial) {
    auto m1 = testutil::random_sparse_measure(lat, 6, rng);
    auto m2 = testutil::random_sparse_measure(lat, 6, rng);
    worst_w1 = std::max(worst_w1, std::abs(wasserstein1(m1, m2) - oracles::wasserstein1_lp(m1, m2)));
  }
  c.require(worst_w1 <= 1e-10, "W1 vs coupling LP deviates by " + fmt(worst_w1));

  // (b) dynamic programming against exhaustive policy enumeration.
  auto tiny = std::make_shared<const Lattice>(
      Lattice::make(0.0, 1.0, 0.25, 0.1, 0.2, -1.0, 1.0, 1.0));
  Dynamics dyn;
  dyn.drift = [](double, double u) { return u; };
  dyn.volatility = [](double, double) { return 0.3; };
  auto st = build_stencils(tiny, dyn);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  double worst_dp = 0.0;
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<double> phi(tiny->nx);
    for (double& v : phi) v = unif(rng);
    auto m0 = testutil::random_measure(tiny, rng);
    const double dp_value = solve_standard(phi, m0, st).value;
    worst_dp = std::max(worst_dp, std::abs(dp_value - oracles::enumerate_policy_min(st, phi, m0)));
  }
  c.require(worst_dp <= 1e-12, "DP vs enumeration deviates by " + fmt(worst_dp));

  // (c) first-order expansion of the test-case functionals along mixtures.
  auto wide = testutil::grid(-3.0, 3.0, 0.25);
  auto tc1 = make_problem_functionals("variance_cap", 0.4);
  auto tc2 = make_problem_functionals("expectation_floor", 0.4);
  for (int trial = 0; trial < 10; ++trial) {
    auto m = testutil::random_measure(wide, rng);
    auto m2 = testutil::random_measure(wide, rng);
    for (const MomentFunctional* f : {&tc1.cost, &tc1.constraint, &tc2.cost, &tc2.constraint}) {
      auto rep = derivative_rep(*f, m);
      for (int q = 0; q < f->outputs; ++q) {
        const double first = moment(m2, rep[q]) - moment(m, rep[q]);
        auto resid = [&](double theta) {
          const double value = eval(*f, mixture(m, m2, theta))[q] - eval(*f, m)[q];
          return std::abs(value - theta * first);
        };
        const double r3 = resid(1e-3), r4 = resid(1e-4);
        if (r3 > 1e-12 && r4 > 1e-12) {
          c.require(std::abs(r4 / 1e-8 - r3 / 1e-6) <= 0.05 * (r3 / 1e-6),
                    "quadratic constant drifts between theta values");
        }
        if (std::abs(first) > 1e-2) {
          c.require(r4 <= 0.5 * std::abs(1e-4 * first), "first-order term does not dominate");
        }
      }
    }
  }
  return c;
}

Check criterion_convexity_demo() {
  Check c;
  auto lat = std::make_shared<const Lattice>(
      Lattice::make(-5.0, 5.0, 1e-2, 1e-2, 1.0, -2.0, 2.0, 0.2));
  const auto dyn = drift_controlled_dynamics();
  const std::vector<ControlField> branches = {ControlField::constant(*lat, -2.0),
                                              ControlField::constant(*lat, 2.0)};
  const std::vector<double> theta = {0.5, 0.5};
  std::vector<ConvexityDemoRow> rows;
  for (double eps : {0.04, 0.01, 0.0025}) {
    auto res = branching_demo(dyn, *lat, branches, theta, eps, 0.0, 100000, 2024);
    rows.push_back({eps, res.d1_mixture});
  }
  c.require(rows[1].d1 < rows[0].d1 && rows[2].d1 < rows[1].d1,
            "d1 not decreasing: " + fmt(rows[0].d1) + ", " + fmt(rows[1].d1) + ", " +
                fmt(rows[2].d1));
  const double slope = loglog_slope(rows);
  c.require(slope >= 0.3 && slope <= 0.7, "log-log slope " + fmt(slope) + " outside [0.3,0.7]");
  if (c.ok) c.detail = "slope " + fmt(slope);  // shown for transparency
  return c;
}

Check criterion_determinism(const std::string& cli, const std::string& configs) {
  Check c;
  const fs::path base = fs::temp_directory_path() / "distctrl_acceptance_det";
  fs::remove_all(base);
  for (const char* sub : {"a", "b"}) {
    const std::string cmd = cli + " solve " + configs + "/tc1.cfg --seed 7 --out " +
                            (base / sub).string() + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    c.require(WEXITSTATUS(status) == 0, std::string("run ") + sub + " failed");
  }
  if (!c.ok) return c;
  for (const char* name : {"convergence.csv", "control.csv", "value.csv", "distribution.csv",
                           "final_distribution.csv", "outer_trace.csv", "summary.json"}) {
    auto read = [&](const char* sub) {
      std::ifstream in(base / sub / name, std::ios::binary);
      std::ostringstream ss;
      ss << in.rdbuf();
      return ss.str();
    };
    c.require(read("a") == read("b"), std::string(name) + " differs between runs");
  }
  return c;
}

int report(int index, const std::string& title, const Check& c, double seconds) {
  std::printf("%s  %d. %s (%.1fs)%s%s\n", c.ok ? "PASS" : "FAIL", index, title.c_str(), seconds,
              c.detail.empty() ? "" : " -- ", c.detail.c_str());
  std::fflush(stdout);
  return c.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: acceptance <cli-binary> <configs-dir>\n");
    return 2;
  }
  const std::string cli = argv[1];
  const std::string configs = argv[2];

  int failures = 0;
  auto timed = [&](int index, const std::string& title, const std::function<Check()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    Check c;
    try {
      c = fn();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += report(index, title, c, secs);
  };

  std::printf("running the two production solves (fine grid, tol 1e-5)...\n");
  std::fflush(stdout);
  NamedRun tc1 = run_production("variance_cap", 0.4, 1e-5);
  NamedRun tc2 = run_production("expectation_floor", 0.4, 1e-5);

  timed(1, "bounded-variance reproduction (fine grid, tol 1e-5)", [&] { return criterion_tc1(tc1); });
  timed(2, "expectation-floor reproduction (tol 1e-5)", [&] { return criterion_tc2(tc2); });
  timed(3, "bang-bang control structure and switching point", [&] { return criterion_control_structure(tc1); });
  timed(4, "augmented-Lagrangian descent across all inner traces", [&] { return criterion_descent(tc1, tc2); });
  timed(5, "inactive constraint reduces to the unconstrained drift", [&] {
    NamedRun free_run = run_production("variance_cap", 1e6, 1e-5);
    return criterion_unconstrained(free_run);
  });
  timed(6, "oracle equivalences (coupling LP, policy enumeration, derivatives)",
        [&] { return criterion_oracles(); });
  timed(7, "delay-and-branch mixing rate", [&] { return criterion_convexity_demo(); });
  timed(8, "bit-identical reruns of the CLI", [&] { return criterion_determinism(cli, configs); });

  std::printf("%s (%d criteria failed)\n", failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED",
              failures);
  return failures == 0 ? 0 : 1;
}
