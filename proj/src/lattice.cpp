#include "distctrl/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace distctrl {

namespace {

int steps_or_throw(double range, double step, const char* what) {
  if (step <= 0.0) throw ConfigError(std::string(what) + " step must be positive");
  const double raw = range / step;
  const int n = static_cast<int>(std::llround(raw));
  if (n < 1 || std::abs(static_cast<double>(n) * step - range) > 1e-9 * std::max(1.0, range)) {
    throw ConfigError(std::string(what) + " step does not divide the range");
  }
  return n;
}

}  // namespace

int Lattice::nearest_node(double x) const {
  const double s = (x - x_min) / dx();
  const int j = static_cast<int>(std::llround(s));
  return std::clamp(j, 0, nx - 1);
}

Lattice Lattice::make(double x_min, double x_max, double dx, double dt, double horizon,
                      double u_min, double u_max, double du) {
  if (x_max <= x_min) throw ConfigError("x_max must exceed x_min");
  if (u_max < u_min) throw ConfigError("u_max must not be below u_min");
  Lattice lat;
  lat.x_min = x_min;
  lat.x_max = x_max;
  lat.nx = steps_or_throw(x_max - x_min, dx, "spatial") + 1;
  lat.dt = dt;
  lat.nt = steps_or_throw(horizon, dt, "time");
  const int nu = (u_max == u_min) ? 0 : steps_or_throw(u_max - u_min, du, "control");
  lat.controls.resize(nu + 1);
  for (int a = 0; a <= nu; ++a) lat.controls[a] = u_min + static_cast<double>(a) * du;
  lat.controls.back() = u_max;
  return lat;
}

StencilTable::StencilTable(std::shared_ptr<const Lattice> lattice, std::vector<StencilRow> rows)
    : lattice_(std::move(lattice)), rows_(std::move(rows)) {
  if (rows_.size() != static_cast<size_t>(lattice_->nx) *
                          static_cast<size_t>(lattice_->n_controls())) {
    throw ShapeError("stencil row count does not match lattice");
  }
}

std::array<std::pair<int, double>, 4> StencilTable::entries(int node, int control) const {
  const StencilRow& r = row(node, control);
  return {{{r.lo_plus, r.w_plus},
           {r.lo_plus + 1, 0.5 - r.w_plus},
           {r.lo_minus, r.w_minus},
           {r.lo_minus + 1, 0.5 - r.w_minus}}};
}

double reflect(double y, double x_min, double x_max) {
  if (y < x_min) y = 2.0 * x_min - y;
  else if (y > x_max) y = 2.0 * x_max - y;
  if (y < x_min || y > x_max) {
    throw ConfigError("successor point leaves the grid even after one reflection");
  }
  return y;
}

namespace {

// Interpolates a reflected successor point onto its bracketing node pair;
// the branch carries total probability 1/2.
void interpolate_branch(double y, const Lattice& lat, int32_t& lo, double& w_lo) {
  const double s = (y - lat.x_min) / lat.dx();
  int j0 = static_cast<int>(std::floor(s));
  j0 = std::clamp(j0, 0, lat.nx - 2);
  double frac = std::clamp(s - static_cast<double>(j0), 0.0, 1.0);
  lo = j0;
  w_lo = 0.5 * (1.0 - frac);
}

void check_lipschitz(const Lattice& lat, const Dynamics& dyn) {
  // Sampled finite-difference ratios over a coarse (x,u) net.
  constexpr int kSamples = 12;
  const double hx = (lat.x_max - lat.x_min) / kSamples;
  const double u0 = lat.controls.front(), u1 = lat.controls.back();
  const double hu = (u1 - u0) / kSamples;
  for (int i = 0; i < kSamples; ++i) {
    const double x = lat.x_min + (i + 0.5) * hx;
    for (int k = 0; k <= kSamples; ++k) {
      const double u = u0 + k * hu;
      const double dbdx = dyn.drift(x + hx, u) - dyn.drift(x, u);
      const double dsdx = dyn.volatility(x + hx, u) - dyn.volatility(x, u);
      if (std::abs(dbdx) + std::abs(dsdx) > dyn.lipschitz_bound * hx) {
        throw ConfigError("dynamics violate the configured Lipschitz bound in x");
      }
      if (hu > 0.0 && k < kSamples) {
        const double dbdu = dyn.drift(x, u + hu) - dyn.drift(x, u);
        const double dsdu = dyn.volatility(x, u + hu) - dyn.volatility(x, u);
        if (std::abs(dbdu) + std::abs(dsdu) > dyn.lipschitz_bound * hu) {
          throw ConfigError("dynamics violate the configured Lipschitz bound in u");
        }
      }
    }
  }
}

}  // namespace

StencilTable build_stencils(std::shared_ptr<const Lattice> lattice, const Dynamics& dyn) {
  const Lattice& lat = *lattice;
  if (lat.nx < 2 || lat.n_controls() < 1) throw ConfigError("degenerate lattice");
  check_lipschitz(lat, dyn);

  const double sqdt = std::sqrt(lat.dt);
  const double width = lat.x_max - lat.x_min;
  const int na = lat.n_controls();
  std::vector<StencilRow> rows(static_cast<size_t>(lat.nx) * static_cast<size_t>(na));

  for (int j = 0; j < lat.nx; ++j) {
    const double x = lat.node(j);
    for (int a = 0; a < na; ++a) {
      const double u = lat.controls[a];
      const double b = dyn.drift(x, u);
      const double sig = dyn.volatility(x, u);
      if (std::abs(b) * lat.dt + std::abs(sig) * sqdt > width) {
        throw ConfigError("time step too large: one-step move exceeds the grid width");
      }
      const double mean = x + b * lat.dt;
      StencilRow& r = rows[static_cast<size_t>(j) * na + a];
      interpolate_branch(reflect(mean + sig * sqdt, lat.x_min, lat.x_max), lat, r.lo_plus,
                         r.w_plus);
      interpolate_branch(reflect(mean - sig * sqdt, lat.x_min, lat.x_max), lat, r.lo_minus,
                         r.w_minus);
    }
  }
  return StencilTable(std::move(lattice), std::move(rows));
}

}  // namespace distctrl
