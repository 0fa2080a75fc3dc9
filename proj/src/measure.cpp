#include "distctrl/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "distctrl/io.hpp"

namespace distctrl {

namespace {

// Kahan-compensated sum; keeps the sum-to-one check meaningful on large grids.
double weight_sum(const std::vector<double>& w) {
  double s = 0.0, comp = 0.0;
  for (double v : w) {
    const double y = v - comp;
    const double t = s + y;
    comp = (t - s) - y;
    s = t;
  }
  return s;
}

}  // namespace

DiscreteMeasure::DiscreteMeasure(std::shared_ptr<const Lattice> lattice,
                                 std::vector<double> weights)
    : lattice_(std::move(lattice)), weights_(std::move(weights)) {
  if (static_cast<int>(weights_.size()) != lattice_->nx) {
    throw ShapeError("weight vector length does not match lattice node count");
  }
  for (double v : weights_) {
    if (!(v >= 0.0)) throw std::invalid_argument("measure weights must be non-negative");
  }
  if (std::abs(weight_sum(weights_) - 1.0) > 1e-12) {
    throw std::invalid_argument("measure weights must sum to 1");
  }
}

DiscreteMeasure DiscreteMeasure::from_push(std::shared_ptr<const Lattice> lattice,
                                           std::vector<double> weights) {
  const double s = weight_sum(weights);
  if (std::abs(s - 1.0) > 1e-13) {
    for (double& v : weights) v /= s;
  }
  return DiscreteMeasure(Unchecked{}, std::move(lattice), std::move(weights));
}

double DiscreteMeasure::mean() const {
  double s = 0.0;
  for (int j = 0; j < size(); ++j) s += lattice_->node(j) * weights_[j];
  return s;
}

double DiscreteMeasure::variance() const {
  const double mu = mean();
  double s = 0.0;
  for (int j = 0; j < size(); ++j) {
    const double d = lattice_->node(j) - mu;
    s += d * d * weights_[j];
  }
  return s;
}

DiscreteMeasure dirac(std::shared_ptr<const Lattice> lattice, double x0) {
  const Lattice& lat = *lattice;
  if (x0 < lat.x_min || x0 > lat.x_max) {
    throw std::domain_error("dirac location lies outside the grid");
  }
  std::vector<double> w(lat.nx, 0.0);
  const double s = (x0 - lat.x_min) / lat.dx();
  int j0 = std::clamp(static_cast<int>(std::floor(s)), 0, lat.nx - 2);
  const double frac = std::clamp(s - static_cast<double>(j0), 0.0, 1.0);
  w[j0] = 1.0 - frac;
  w[j0 + 1] = frac;
  return DiscreteMeasure(std::move(lattice), std::move(w));
}

DiscreteMeasure mixture(const DiscreteMeasure& m1, const DiscreteMeasure& m2, double theta) {
  if (m1.lattice_ptr() != m2.lattice_ptr()) {
    throw ShapeError("mixture requires measures on the same lattice");
  }
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw std::domain_error("mixture parameter must lie in [0,1]");
  }
  std::vector<double> w(m1.size());
  const double a = 1.0 - theta;
  for (int j = 0; j < m1.size(); ++j) w[j] = a * m1.weight(j) + theta * m2.weight(j);
  return DiscreteMeasure::from_push(m1.lattice_ptr(), std::move(w));
}

double moment(const DiscreteMeasure& m, std::span<const double> phi) {
  if (static_cast<int>(phi.size()) != m.size()) {
    throw ShapeError("grid function length does not match lattice node count");
  }
  double s = 0.0;
  for (int j = 0; j < m.size(); ++j) s += phi[j] * m.weight(j);
  return s;
}

double moment(const DiscreteMeasure& m, const std::function<double(double)>& phi) {
  double s = 0.0;
  for (int j = 0; j < m.size(); ++j) s += phi(m.lattice().node(j)) * m.weight(j);
  return s;
}

std::vector<double> sample_on_nodes(const Lattice& lat, const std::function<double(double)>& f) {
  std::vector<double> out(lat.nx);
  for (int j = 0; j < lat.nx; ++j) out[j] = f(lat.node(j));
  return out;
}

double wasserstein1(const DiscreteMeasure& m1, const DiscreteMeasure& m2) {
  if (m1.lattice_ptr() != m2.lattice_ptr()) {
    throw ShapeError("wasserstein1 requires measures on the same lattice");
  }
  const double dx = m1.lattice().dx();
  double cdf1 = 0.0, cdf2 = 0.0, d = 0.0;
  for (int j = 0; j + 1 < m1.size(); ++j) {
    cdf1 += m1.weight(j);
    cdf2 += m2.weight(j);
    d += std::abs(cdf1 - cdf2);
  }
  return dx * d;
}

double empirical_wasserstein1(std::span<const double> samples1,
                              std::span<const double> samples2) {
  if (samples1.size() != samples2.size()) {
    throw ShapeError("empirical_wasserstein1 requires equal sample counts");
  }
  if (samples1.empty()) throw std::invalid_argument("empty sample sets");
  std::vector<double> a(samples1.begin(), samples1.end());
  std::vector<double> b(samples2.begin(), samples2.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

void write_csv(const DiscreteMeasure& m, std::ostream& out) {
  out << "x,weight\n";
  for (int j = 0; j < m.size(); ++j) {
    out << format_double(m.lattice().node(j)) << ',' << format_double(m.weight(j)) << '\n';
  }
}

}  // namespace distctrl
