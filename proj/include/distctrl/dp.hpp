#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "distctrl/lattice.hpp"
#include "distctrl/measure.hpp"

namespace distctrl {

/// Kernel execution policy. The parallel path produces bit-identical results
/// to the serial reference (per-node writes only, no cross-thread reductions).
enum class Exec { serial, parallel };

/// V(t,x) on the time-extended grid, t = 0..nt (row nt holds the terminal cost).
struct ValueField {
  int nt = 0;
  int nx = 0;
  std::vector<double> v;

  ValueField() = default;
  ValueField(int nt_, int nx_) : nt(nt_), nx(nx_), v(static_cast<size_t>(nt_ + 1) * nx_, 0.0) {}
  double& at(int t, int j) { return v[static_cast<size_t>(t) * nx + j]; }
  double at(int t, int j) const { return v[static_cast<size_t>(t) * nx + j]; }
  std::span<const double> slice(int t) const { return {v.data() + static_cast<size_t>(t) * nx, static_cast<size_t>(nx)}; }
  std::span<double> slice(int t) { return {v.data() + static_cast<size_t>(t) * nx, static_cast<size_t>(nx)}; }
};

/// Feedback control indices into the lattice control grid, t = 0..nt-1.
struct ControlField {
  int nt = 0;
  int nx = 0;
  std::vector<int32_t> idx;

  ControlField() = default;
  ControlField(int nt_, int nx_) : nt(nt_), nx(nx_), idx(static_cast<size_t>(nt_) * nx_, 0) {}
  int32_t& at(int t, int j) { return idx[static_cast<size_t>(t) * nx + j]; }
  int32_t at(int t, int j) const { return idx[static_cast<size_t>(t) * nx + j]; }
  double value(const Lattice& lat, int t, int j) const { return lat.controls[at(t, j)]; }

  /// Constant feedback with the given control value (must be a grid control).
  static ControlField constant(const Lattice& lat, double u);
};

/// One backward Bellman step: v_out[j] = min over controls of the stencil
/// expectation of v_next, recording the minimizing control (ties resolved to
/// the smallest control value). Serial reference implementation.
void backward_step_serial(const StencilTable& st, std::span<const double> v_next,
                          std::span<double> v_out, std::span<int32_t> ctrl_out);

/// OpenMP version of backward_step_serial; bit-identical output.
void backward_step_parallel(const StencilTable& st, std::span<const double> v_next,
                            std::span<double> v_out, std::span<int32_t> ctrl_out);

/// Backward dynamic programming sweep for the terminal cost phi (sampled on
/// nodes). Throws std::invalid_argument when phi contains NaN.
std::pair<ValueField, ControlField> hjb_backward(const StencilTable& st,
                                                 std::span<const double> phi,
                                                 Exec exec = Exec::parallel);

/// Forward Chapman-Kolmogorov push of m0 under a feedback control; returns
/// nt+1 slices, slice 0 being m0.
std::vector<DiscreteMeasure> push_forward(const DiscreteMeasure& m0, const ControlField& feedback,
                                          const StencilTable& st);

/// Solution of the standard problem: minimize the expectation of phi at the
/// final time over feedback controls on the chain.
struct StandardSolution {
  double value = 0.0;
  DiscreteMeasure terminal;
  ControlField feedback;
  ValueField values;
  std::vector<DiscreteMeasure> flow;
};

StandardSolution solve_standard(std::span<const double> phi, const DiscreteMeasure& m0,
                                const StencilTable& st, Exec exec = Exec::parallel);

}  // namespace distctrl
