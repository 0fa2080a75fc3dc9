#pragma once

#include <cstdint>
#include <string>

#include "distctrl/alm.hpp"

namespace distctrl {

/// One batch run: grid geometry, problem selection, solver parameters.
/// Defaults are the CI-friendly coarse grid; apply_full_grid switches to the
/// fine production grid.
struct RunConfig {
  std::string problem = "variance_cap";
  double alpha = 0.4;

  double x_min = -5.0;
  double x_max = 5.0;
  double dx = 1e-2;
  double dt = 1e-2;
  double horizon = 1.0;
  double u_min = -2.0;
  double u_max = 2.0;
  double du = 0.2;

  double x0 = 0.0;
  double tolerance = 1e-3;  // eta_star and omega_star
  double c0 = 10.0;
  int max_outer = 100;
  int max_inner = 5000;
  double dtheta = 1e-6;
  uint64_t seed = 1;
  std::string out_dir = "out";

  void validate() const;  // throws ConfigError
};

/// Parses a flat key=value file with '#' comments. Errors carry
/// "<path>:<line>:" prefixes.
RunConfig parse_config_file(const std::string& path);

/// Switches to the fine grid (dx=1e-3, du=1e-1).
void apply_full_grid(RunConfig& cfg);

AlmConfig alm_config(const RunConfig& cfg);

}  // namespace distctrl
