#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "distctrl/dp.hpp"
#include "distctrl/lattice.hpp"

namespace distctrl {

/// Terminal samples of a Monte-Carlo path batch.
struct PathEnsemble {
  int n_paths = 0;
  double dt_sim = 0.0;
  uint64_t seed = 0;
  std::vector<double> terminal_samples;
};

/// Euler-Maruyama simulation of the SDE under a feedback control. Controls
/// are looked up at the nearest node and the current step; paths are folded
/// back into the domain like the chain. Deterministic per seed (fixed-size
/// path batches carry their own substreams).
PathEnsemble simulate_feedback(const Dynamics& dyn, const ControlField& feedback,
                               const Lattice& lat, double x0, int n_paths, uint64_t seed);

/// Standard normal quantile (bisection on erfc; accurate to ~1e-12).
double normal_quantile(double p);

struct BranchingResult {
  double d1_mixture = 0.0;              // empirical W1 to the theta-mixture
  std::vector<int64_t> branch_counts;   // realized branch frequencies
};

/// Delay-and-branch construction: hold a neutral control on [0,eps], select a
/// branch from the quantile cell of the scaled first Brownian increment, then
/// run that branch's feedback time-shifted by eps. Returns the empirical W1
/// distance between the construction's terminal law and the theta-mixture of
/// the branch terminal laws.
BranchingResult branching_demo(const Dynamics& dyn, const Lattice& lat,
                               const std::vector<ControlField>& controls,
                               std::span<const double> theta, double eps, double x0, int n_paths,
                               uint64_t seed);

}  // namespace distctrl
