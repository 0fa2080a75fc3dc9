#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "distctrl/errors.hpp"

namespace distctrl {

/// Uniform space/time/control discretization of the controlled SDE.
///
/// Nodes are x_j = x_min + j*dx for j = 0..nx-1, time steps t = 0..nt with
/// nt*dt = T, and the control set is materialized as a sorted grid.
struct Lattice {
  double x_min = 0.0;
  double x_max = 0.0;
  int nx = 0;
  double dt = 0.0;
  int nt = 0;
  std::vector<double> controls;

  double dx() const { return (x_max - x_min) / static_cast<double>(nx - 1); }
  double node(int j) const { return x_min + static_cast<double>(j) * dx(); }
  double horizon() const { return static_cast<double>(nt) * dt; }
  int n_controls() const { return static_cast<int>(controls.size()); }

  int nearest_node(double x) const;

  /// Builds a lattice from step sizes; throws ConfigError if the steps do not
  /// divide the ranges to within 1e-9 relative accuracy.
  static Lattice make(double x_min, double x_max, double dx, double dt, double horizon,
                      double u_min, double u_max, double du);
};

/// Controlled SDE coefficients dX = b(X,u) dt + sigma(X,u) dW.
struct Dynamics {
  std::function<double(double, double)> drift;
  std::function<double(double, double)> volatility;
  // Sampled finite-difference Lipschitz check threshold for both coefficients.
  double lipschitz_bound = 1e3;
};

/// One (node, control) row of the transition kernel: two successor points with
/// probability 1/2 each, linearly interpolated onto the node pair
/// (lo, lo+1). The weight stored is the probability carried by lo; the
/// neighbour lo+1 carries 0.5 - w.
struct StencilRow {
  int32_t lo_plus = 0;
  int32_t lo_minus = 0;
  double w_plus = 0.0;   // probability on node lo_plus
  double w_minus = 0.0;  // probability on node lo_minus
};

/// Precomputed transition rows for every (node, control) pair.
class StencilTable {
 public:
  StencilTable(std::shared_ptr<const Lattice> lattice, std::vector<StencilRow> rows);

  const Lattice& lattice() const { return *lattice_; }
  const std::shared_ptr<const Lattice>& lattice_ptr() const { return lattice_; }

  const StencilRow& row(int node, int control) const {
    return rows_[static_cast<size_t>(node) * static_cast<size_t>(lattice_->n_controls()) +
                 static_cast<size_t>(control)];
  }

  /// Expands a row into its up-to-4 (node index, probability) entries.
  std::array<std::pair<int, double>, 4> entries(int node, int control) const;

 private:
  std::shared_ptr<const Lattice> lattice_;
  std::vector<StencilRow> rows_;
};

/// Folds y into [x_min, x_max] once; throws ConfigError if a second fold
/// would be required.
double reflect(double y, double x_min, double x_max);

/// Builds the two-branch transition rows y = x + b dt +/- sigma sqrt(dt) with
/// reflecting boundaries and linear interpolation onto the grid.
StencilTable build_stencils(std::shared_ptr<const Lattice> lattice, const Dynamics& dyn);

}  // namespace distctrl
