// Compares the serial reference kernels against the OpenMP ones on the
// production-size grid and reports one full standard solve for scale.

#include <chrono>
#include <cstdio>
#include <numeric>
#include <vector>

#include "distctrl/dp.hpp"
#include "distctrl/run.hpp"

using namespace distctrl;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

int main() {
  auto lattice = std::make_shared<const Lattice>(
      Lattice::make(-5.0, 5.0, 1e-3, 1e-2, 1.0, -2.0, 2.0, 1e-1));
  const auto st = build_stencils(lattice, drift_controlled_dynamics());
  const int nx = lattice->nx;

  std::vector<double> phi(nx), v_serial(nx), v_parallel(nx);
  for (int j = 0; j < nx; ++j) phi[j] = lattice->node(j) * lattice->node(j);
  std::vector<int32_t> c_serial(nx), c_parallel(nx);

  constexpr int kReps = 50;
  auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < kReps; ++r) backward_step_serial(st, phi, v_serial, c_serial);
  const double serial_ms = ms_since(t0) / kReps;

  t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < kReps; ++r) backward_step_parallel(st, phi, v_parallel, c_parallel);
  const double parallel_ms = ms_since(t0) / kReps;

  bool identical = v_serial == v_parallel && c_serial == c_parallel;

  std::printf("backward step (%d nodes x %d controls)\n", nx, lattice->n_controls());
  std::printf("  serial   %8.3f ms\n", serial_ms);
  std::printf("  parallel %8.3f ms   speedup %.2fx   bit-identical: %s\n", parallel_ms,
              serial_ms / parallel_ms, identical ? "yes" : "NO");

  const auto m0 = dirac(lattice, 0.0);
  t0 = std::chrono::steady_clock::now();
  auto sol = solve_standard(phi, m0, st);
  std::printf("full standard solve (%d steps): %.1f ms (value %.6f)\n", lattice->nt,
              ms_since(t0), sol.value);
  return identical ? 0 : 1;
}
