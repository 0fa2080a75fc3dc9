#pragma once

#include <memory>
#include <random>
#include <vector>

#include "distctrl/lattice.hpp"
#include "distctrl/measure.hpp"

namespace testutil {

inline std::shared_ptr<const distctrl::Lattice> grid(double x_min, double x_max, double dx,
                                                     double dt = 0.1, double horizon = 0.2,
                                                     double u_min = -1.0, double u_max = 1.0,
                                                     double du = 1.0) {
  return std::make_shared<const distctrl::Lattice>(
      distctrl::Lattice::make(x_min, x_max, dx, dt, horizon, u_min, u_max, du));
}

/// Random measure on the full lattice.
inline distctrl::DiscreteMeasure random_measure(std::shared_ptr<const distctrl::Lattice> lat,
                                                std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> w(lat->nx);
  double sum = 0.0;
  for (double& v : w) {
    v = unif(rng);
    sum += v;
  }
  for (double& v : w) v /= sum;
  return distctrl::DiscreteMeasure::from_push(std::move(lat), std::move(w));
}

/// Random measure supported on at most max_support nodes.
inline distctrl::DiscreteMeasure random_sparse_measure(
    std::shared_ptr<const distctrl::Lattice> lat, int max_support, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.1, 1.0);
  std::uniform_int_distribution<int> node(0, lat->nx - 1);
  std::uniform_int_distribution<int> count(1, max_support);
  std::vector<double> w(lat->nx, 0.0);
  const int k = count(rng);
  for (int i = 0; i < k; ++i) w[node(rng)] += unif(rng);
  double sum = 0.0;
  for (double v : w) sum += v;
  for (double& v : w) v /= sum;
  return distctrl::DiscreteMeasure::from_push(std::move(lat), std::move(w));
}

}  // namespace testutil
