#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "distctrl/run.hpp"
#include "distctrl/simulate.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNoConvergence = 3;
constexpr int kExitIo = 4;

struct CommonArgs {
  std::string config_path;
  std::optional<double> tolerance;
  std::optional<std::string> out_dir;
  std::optional<uint64_t> seed;
  bool full_grid = false;
};

distctrl::RunConfig load_config(const CommonArgs& args) {
  distctrl::RunConfig cfg = distctrl::parse_config_file(args.config_path);
  if (args.full_grid) distctrl::apply_full_grid(cfg);
  if (args.tolerance) cfg.tolerance = *args.tolerance;
  if (args.out_dir) cfg.out_dir = *args.out_dir;
  if (args.seed) cfg.seed = *args.seed;
  cfg.validate();
  return cfg;
}

int run_solve(const CommonArgs& args) {
  const auto cfg = load_config(args);
  const auto result = distctrl::execute_run(cfg);
  distctrl::write_run_artifacts(cfg, result, cfg.out_dir);
  if (!result.report.converged) {
    std::cerr << "solve did not converge: " << result.report.failure << "\n";
    return kExitNoConvergence;
  }
  std::cout << "lambda_bar =";
  for (double l : result.report.lambda_bar) std::cout << ' ' << l;
  std::cout << "  vi_residual = " << result.report.vi_residual
            << "  standard_problems = " << result.report.standard_problems << "\n";
  return kExitOk;
}

int run_sweep(const CommonArgs& args, const std::vector<double>& tolerances) {
  auto base = load_config(args);
  std::filesystem::create_directories(base.out_dir);
  std::vector<distctrl::SweepRow> rows;
  bool all_ok = true;
  const distctrl::Problem problem = distctrl::build_problem(base);
  for (double tol : tolerances) {
    distctrl::RunConfig cfg = base;
    cfg.tolerance = tol;
    const auto result = distctrl::execute_run(cfg, problem);
    char label[32];
    std::snprintf(label, sizeof(label), "tol_%g", tol);
    distctrl::write_run_artifacts(cfg, result, std::filesystem::path(cfg.out_dir) / label);
    rows.push_back({tol, result.report.converged, result.report.g_ubar,
                    result.report.lambda_bar, result.report.vi_residual, result.report.c_final,
                    result.report.standard_problems});
    all_ok = all_ok && result.report.converged;
  }
  distctrl::write_sweep_csv(rows, std::filesystem::path(base.out_dir) / "sweep.csv");
  return all_ok ? kExitOk : kExitNoConvergence;
}

int run_demo_convexity(const CommonArgs& args, const std::vector<double>& epsilons,
                       int n_paths) {
  auto cfg = load_config(args);
  auto lattice = std::make_shared<const distctrl::Lattice>(
      distctrl::Lattice::make(cfg.x_min, cfg.x_max, cfg.dx, cfg.dt, cfg.horizon, cfg.u_min,
                              cfg.u_max, cfg.du));
  const auto dyn = distctrl::drift_controlled_dynamics();
  const std::vector<distctrl::ControlField> branches = {
      distctrl::ControlField::constant(*lattice, cfg.u_min),
      distctrl::ControlField::constant(*lattice, cfg.u_max)};
  const std::vector<double> theta = {0.5, 0.5};

  std::vector<distctrl::ConvexityDemoRow> rows;
  for (double eps : epsilons) {
    const auto res = distctrl::branching_demo(dyn, *lattice, branches, theta, eps, cfg.x0,
                                              n_paths, cfg.seed);
    rows.push_back({eps, res.d1_mixture});
    std::cout << "eps = " << eps << "  d1_mixture = " << res.d1_mixture << "\n";
  }
  std::filesystem::create_directories(cfg.out_dir);
  distctrl::write_convexity_csv(rows, std::filesystem::path(cfg.out_dir) / "convexity.csv");
  if (rows.size() >= 2) {
    std::cout << "log-log slope = " << distctrl::loglog_slope(rows) << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solver for stochastic control problems with constraints on the final-time "
               "state distribution"};
  app.require_subcommand(1);

  CommonArgs args;
  std::vector<double> tolerances;
  std::vector<double> epsilons;
  int n_paths = 100000;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("config", args.config_path, "run configuration file")->required();
    cmd->add_option("--tolerance", args.tolerance, "override the stopping tolerance");
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed, "override the seed");
    cmd->add_flag("--full-grid", args.full_grid, "use the fine grid (dx=1e-3, du=0.1)");
  };

  CLI::App* solve = app.add_subcommand("solve", "run the solver once");
  add_common(solve);

  CLI::App* sweep = app.add_subcommand("sweep", "run the solver over a tolerance list");
  add_common(sweep);
  sweep->add_option("--tolerances", tolerances, "comma-separated tolerance list")
      ->delimiter(',');

  CLI::App* demo = app.add_subcommand("demo-convexity",
                                      "Monte-Carlo check of the reachable-set mixing bound");
  add_common(demo);
  demo->add_option("--epsilons", epsilons, "comma-separated delay list")
      ->delimiter(',')
      ->required();
  demo->add_option("--paths", n_paths, "Monte-Carlo path count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (solve->parsed()) return run_solve(args);
    if (sweep->parsed()) return run_sweep(args, tolerances);
    if (demo->parsed()) return run_demo_convexity(args, epsilons, n_paths);
  } catch (const distctrl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
