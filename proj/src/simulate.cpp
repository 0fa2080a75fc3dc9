#include "distctrl/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "distctrl/measure.hpp"

namespace distctrl {

namespace {

constexpr int kBatch = 4096;

std::mt19937_64 batch_rng(uint64_t seed, uint64_t stream, uint64_t batch) {
  std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                    static_cast<uint32_t>(stream), static_cast<uint32_t>(batch)};
  return std::mt19937_64(seq);
}

double fold_once(double y, double lo, double hi) {
  if (y < lo) y = 2.0 * lo - y;
  else if (y > hi) y = 2.0 * hi - y;
  return std::clamp(y, lo, hi);
}

}  // namespace

PathEnsemble simulate_feedback(const Dynamics& dyn, const ControlField& feedback,
                               const Lattice& lat, double x0, int n_paths, uint64_t seed) {
  if (n_paths < 1) throw std::invalid_argument("n_paths must be positive");
  if (feedback.nt != lat.nt || feedback.nx != lat.nx) {
    throw ShapeError("feedback field does not match lattice");
  }
  PathEnsemble ens{n_paths, lat.dt, seed, std::vector<double>(n_paths)};
  const double sqdt = std::sqrt(lat.dt);
  const int n_batches = (n_paths + kBatch - 1) / kBatch;

#pragma omp parallel for schedule(static)
  for (int b = 0; b < n_batches; ++b) {
    auto rng = batch_rng(seed, 0, static_cast<uint64_t>(b));
    std::normal_distribution<double> normal(0.0, 1.0);
    const int lo = b * kBatch;
    const int hi = std::min(n_paths, lo + kBatch);
    for (int p = lo; p < hi; ++p) {
      double x = x0;
      for (int t = 0; t < lat.nt; ++t) {
        const double u = feedback.value(lat, t, lat.nearest_node(x));
        x += dyn.drift(x, u) * lat.dt + dyn.volatility(x, u) * sqdt * normal(rng);
        x = fold_once(x, lat.x_min, lat.x_max);
      }
      ens.terminal_samples[p] = x;
    }
  }
  return ens;
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("quantile argument must lie in (0,1)");
  double lo = -12.0, hi = 12.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double cdf = 0.5 * std::erfc(-mid / std::sqrt(2.0));
    if (cdf < p) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

BranchingResult branching_demo(const Dynamics& dyn, const Lattice& lat,
                               const std::vector<ControlField>& controls,
                               std::span<const double> theta, double eps, double x0, int n_paths,
                               uint64_t seed) {
  const int k_branches = static_cast<int>(controls.size());
  if (k_branches < 1 || static_cast<int>(theta.size()) != k_branches) {
    throw std::invalid_argument("need one weight per branch control");
  }
  double wsum = 0.0;
  for (double w : theta) {
    if (!(w > 0.0)) throw std::invalid_argument("branch weights must be positive");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-12) throw std::invalid_argument("branch weights must sum to 1");
  const double horizon = lat.horizon();
  if (!(eps > 0.0 && eps < horizon)) throw std::invalid_argument("delay must lie in (0, T)");
  if (n_paths < 1) throw std::invalid_argument("n_paths must be positive");

  // Branch thresholds: standard-normal quantiles of the cumulative weights.
  std::vector<double> thresholds(k_branches - 1);
  double cum = 0.0;
  for (int k = 0; k + 1 < k_branches; ++k) {
    cum += theta[k];
    thresholds[k] = normal_quantile(cum);
  }

  // Delay interval in substeps no longer than dt; main interval in nt steps.
  const int n_delay = std::max(1, static_cast<int>(std::ceil(eps / lat.dt - 1e-12)));
  const double dt_delay = eps / n_delay;
  const double dt_main = (horizon - eps) / lat.nt;
  const double u_neutral = 0.0;

  BranchingResult result;
  std::vector<double> branched(n_paths);
  std::vector<int64_t> counts(k_branches, 0);

  const int n_batches = (n_paths + kBatch - 1) / kBatch;
#pragma omp parallel for schedule(static)
  for (int b = 0; b < n_batches; ++b) {
    auto rng = batch_rng(seed, 1, static_cast<uint64_t>(b));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<int64_t> local_counts(k_branches, 0);
    const int lo = b * kBatch;
    const int hi = std::min(n_paths, lo + kBatch);
    for (int p = lo; p < hi; ++p) {
      double x = x0;
      double w_eps = 0.0;
      const double sq_delay = std::sqrt(dt_delay);
      for (int t = 0; t < n_delay; ++t) {
        const double dw = sq_delay * normal(rng);
        w_eps += dw;
        x += dyn.drift(x, u_neutral) * dt_delay + dyn.volatility(x, u_neutral) * dw;
        x = fold_once(x, lat.x_min, lat.x_max);
      }
      const double z = w_eps / std::sqrt(eps);
      int branch = 0;
      while (branch + 1 < k_branches && z >= thresholds[branch]) ++branch;
      ++local_counts[branch];

      const ControlField& fb = controls[branch];
      const double sq_main = std::sqrt(dt_main);
      for (int t = 0; t < lat.nt; ++t) {
        // Time-shifted control: the branch feedback is read at t*dt_main,
        // i.e. delayed by eps relative to simulation time.
        const int row = std::min(lat.nt - 1,
                                 static_cast<int>(static_cast<double>(t) * dt_main / lat.dt));
        const double u = fb.value(lat, row, lat.nearest_node(x));
        x += dyn.drift(x, u) * dt_main + dyn.volatility(x, u) * sq_main * normal(rng);
        x = fold_once(x, lat.x_min, lat.x_max);
      }
      branched[p] = x;
    }
#pragma omp critical
    for (int k = 0; k < k_branches; ++k) counts[k] += local_counts[k];
  }
  result.branch_counts = counts;

  // Theta-mixture of the undelayed branch laws, assembled from per-branch
  // ensembles with proportional sample counts.
  std::vector<double> mixture_samples;
  mixture_samples.reserve(n_paths);
  int assigned = 0;
  for (int k = 0; k < k_branches; ++k) {
    const int nk = (k + 1 == k_branches)
                       ? n_paths - assigned
                       : static_cast<int>(std::llround(theta[k] * n_paths));
    assigned += nk;
    if (nk <= 0) continue;
    auto ens = simulate_feedback(dyn, controls[k], lat, x0, nk, seed + 7919 * (k + 1));
    mixture_samples.insert(mixture_samples.end(), ens.terminal_samples.begin(),
                           ens.terminal_samples.end());
  }

  result.d1_mixture = empirical_wasserstein1(branched, mixture_samples);
  return result;
}

}  // namespace distctrl
