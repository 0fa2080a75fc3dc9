#include "distctrl/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "distctrl/errors.hpp"

namespace distctrl {

void RunConfig::validate() const {
  if (!(dx > 0.0) || !(dt > 0.0) || !(du > 0.0)) throw ConfigError("grid steps must be positive");
  if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
  if (!(x_max > x_min)) throw ConfigError("x_max must exceed x_min");
  if (!(u_max > u_min)) throw ConfigError("u_max must exceed u_min");
  if (x0 < x_min || x0 > x_max) throw ConfigError("x0 lies outside the grid");
  if (!(tolerance > 0.0)) throw ConfigError("tolerance must be positive");
  const double steps = horizon / dt;
  if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps)) {
    throw ConfigError("dt does not divide the horizon");
  }
  if (problem != "variance_cap" && problem != "expectation_floor") {
    throw ConfigError("unknown problem '" + problem + "'");
  }
  if (max_outer < 1 || max_inner < 1) throw ConfigError("iteration caps must be at least 1");
  if (!(c0 > 0.0)) throw ConfigError("c0 must be positive");
  if (!(dtheta > 0.0) || dtheta > 1.0) throw ConfigError("dtheta must lie in (0,1]");
}

namespace {

[[noreturn]] void fail(const std::string& path, int line, const std::string& msg) {
  throw ConfigError(path + ":" + std::to_string(line) + ": " + msg);
}

double parse_number(const std::string& path, int line, const std::string& v) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) fail(path, line, "trailing characters after number '" + v + "'");
    return x;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    fail(path, line, "expected a number, got '" + v + "'");
  }
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  RunConfig cfg;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string stripped = trim(raw);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) fail(path, line, "expected 'key = value'");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty() || value.empty()) fail(path, line, "expected 'key = value'");

    if (key == "problem") cfg.problem = value;
    else if (key == "alpha") cfg.alpha = parse_number(path, line, value);
    else if (key == "x_min") cfg.x_min = parse_number(path, line, value);
    else if (key == "x_max") cfg.x_max = parse_number(path, line, value);
    else if (key == "dx") cfg.dx = parse_number(path, line, value);
    else if (key == "dt") cfg.dt = parse_number(path, line, value);
    else if (key == "T") cfg.horizon = parse_number(path, line, value);
    else if (key == "u_min") cfg.u_min = parse_number(path, line, value);
    else if (key == "u_max") cfg.u_max = parse_number(path, line, value);
    else if (key == "du") cfg.du = parse_number(path, line, value);
    else if (key == "x0") cfg.x0 = parse_number(path, line, value);
    else if (key == "tolerance") cfg.tolerance = parse_number(path, line, value);
    else if (key == "c0") cfg.c0 = parse_number(path, line, value);
    else if (key == "max_outer") cfg.max_outer = static_cast<int>(parse_number(path, line, value));
    else if (key == "max_inner") cfg.max_inner = static_cast<int>(parse_number(path, line, value));
    else if (key == "dtheta") cfg.dtheta = parse_number(path, line, value);
    else if (key == "seed") cfg.seed = static_cast<uint64_t>(parse_number(path, line, value));
    else if (key == "out_dir") cfg.out_dir = value;
    else fail(path, line, "unknown key '" + key + "'");
  }
  return cfg;
}

void apply_full_grid(RunConfig& cfg) {
  cfg.dx = 1e-3;
  cfg.du = 1e-1;
}

AlmConfig alm_config(const RunConfig& cfg) {
  AlmConfig a;
  a.eta_star = cfg.tolerance;
  a.omega_star = cfg.tolerance;
  a.c0 = cfg.c0;
  a.max_outer = cfg.max_outer;
  a.max_inner = cfg.max_inner;
  a.dtheta = cfg.dtheta;
  return a;
}

}  // namespace distctrl
