#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "distctrl/lattice.hpp"

namespace distctrl {

/// Probability weights on the nodes of a lattice. Immutable after
/// construction; weights are non-negative and sum to 1 within 1e-12.
class DiscreteMeasure {
 public:
  DiscreteMeasure(std::shared_ptr<const Lattice> lattice, std::vector<double> weights);

  const std::vector<double>& weights() const { return weights_; }
  double weight(int j) const { return weights_[static_cast<size_t>(j)]; }
  int size() const { return static_cast<int>(weights_.size()); }
  const Lattice& lattice() const { return *lattice_; }
  const std::shared_ptr<const Lattice>& lattice_ptr() const { return lattice_; }

  double mean() const;
  double variance() const;

  /// Construction path for forward pushes and mixtures: renormalizes the
  /// weight sum to 1 when accumulated drift exceeds 1e-13.
  static DiscreteMeasure from_push(std::shared_ptr<const Lattice> lattice,
                                   std::vector<double> weights);

 private:
  struct Unchecked {};
  DiscreteMeasure(Unchecked, std::shared_ptr<const Lattice> lattice, std::vector<double> weights)
      : lattice_(std::move(lattice)), weights_(std::move(weights)) {}

  std::shared_ptr<const Lattice> lattice_;
  std::vector<double> weights_;
};

/// Point mass at x0, split between the two bracketing nodes by linear
/// interpolation. Throws std::domain_error when x0 lies outside the grid.
DiscreteMeasure dirac(std::shared_ptr<const Lattice> lattice, double x0);

/// (1-theta)*m1 + theta*m2 on a shared lattice.
DiscreteMeasure mixture(const DiscreteMeasure& m1, const DiscreteMeasure& m2, double theta);

/// Integral of a node-sampled grid function against the measure.
double moment(const DiscreteMeasure& m, std::span<const double> phi);
double moment(const DiscreteMeasure& m, const std::function<double(double)>& phi);

/// Samples a scalar function on every lattice node.
std::vector<double> sample_on_nodes(const Lattice& lat, const std::function<double(double)>& f);

/// Wasserstein-1 distance via the 1-D CDF closed form.
double wasserstein1(const DiscreteMeasure& m1, const DiscreteMeasure& m2);

/// Wasserstein-1 distance between two equally sized empirical samples
/// (mean absolute difference of order statistics). Inputs need not be sorted.
double empirical_wasserstein1(std::span<const double> samples1, std::span<const double> samples2);

/// Serializes one measure as "x,weight" rows.
void write_csv(const DiscreteMeasure& m, std::ostream& out);

}  // namespace distctrl
