#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace oracles {

namespace {

constexpr double kEps = 1e-9;

struct Tableau {
  int m, n;  // n includes artificial columns
  std::vector<std::vector<double>> t;
  std::vector<double> rhs;
  std::vector<int> basis;

  void pivot(int row, int col) {
    const double p = t[row][col];
    for (int j = 0; j < n; ++j) t[row][j] /= p;
    rhs[row] /= p;
    for (int i = 0; i < m; ++i) {
      if (i == row) continue;
      const double f = t[i][col];
      if (f == 0.0) continue;
      for (int j = 0; j < n; ++j) t[i][j] -= f * t[row][j];
      rhs[i] -= f * rhs[row];
    }
    basis[row] = col;
  }

  // Bland's rule: entering = smallest eligible column with negative reduced
  // cost; leaving = smallest basis index among the minimum-ratio rows.
  bool iterate(const std::vector<double>& cost, int n_eligible) {
    std::vector<double> dual(n, 0.0);
    for (int j = 0; j < n_eligible; ++j) {
      double rc = cost[j];
      for (int i = 0; i < m; ++i) rc -= cost[basis[i]] * t[i][j];
      dual[j] = rc;
    }
    int enter = -1;
    for (int j = 0; j < n_eligible; ++j) {
      if (dual[j] < -kEps) {
        enter = j;
        break;
      }
    }
    if (enter < 0) return false;

    int leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      if (t[i][enter] > kEps) {
        const double ratio = rhs[i] / t[i][enter];
        if (ratio < best_ratio - 1e-12 ||
            (ratio < best_ratio + 1e-12 && (leave < 0 || basis[i] < basis[leave]))) {
          best_ratio = std::min(best_ratio, ratio);
          leave = i;
        }
      }
    }
    if (leave < 0) throw std::runtime_error("simplex: unbounded problem");
    pivot(leave, enter);
    return true;
  }

  double objective(const std::vector<double>& cost) const {
    double v = 0.0;
    for (int i = 0; i < m; ++i) v += cost[basis[i]] * rhs[i];
    return v;
  }
};

}  // namespace

double simplex_min(std::vector<std::vector<double>> a, std::vector<double> b,
                   std::vector<double> c) {
  const int m = static_cast<int>(a.size());
  const int n_real = static_cast<int>(c.size());
  Tableau tab;
  tab.m = m;
  tab.n = n_real + m;
  tab.t.assign(m, std::vector<double>(tab.n, 0.0));
  tab.rhs = b;
  tab.basis.resize(m);
  for (int i = 0; i < m; ++i) {
    if (b[i] < 0.0) throw std::invalid_argument("simplex: negative right-hand side");
    for (int j = 0; j < n_real; ++j) tab.t[i][j] = a[i][j];
    tab.t[i][n_real + i] = 1.0;
    tab.basis[i] = n_real + i;
  }

  // Phase 1: drive the artificial variables to zero.
  std::vector<double> phase1(tab.n, 0.0);
  for (int j = n_real; j < tab.n; ++j) phase1[j] = 1.0;
  while (tab.iterate(phase1, tab.n)) {
  }
  if (tab.objective(phase1) > 1e-8) throw std::runtime_error("simplex: infeasible problem");

  // Pivot leftover basic artificials onto real columns where possible.
  for (int i = 0; i < m; ++i) {
    if (tab.basis[i] < n_real) continue;
    for (int j = 0; j < n_real; ++j) {
      if (std::abs(tab.t[i][j]) > kEps) {
        tab.pivot(i, j);
        break;
      }
    }
  }

  // Phase 2 over the real columns only.
  std::vector<double> cost(tab.n, 0.0);
  for (int j = 0; j < n_real; ++j) cost[j] = c[j];
  while (tab.iterate(cost, n_real)) {
  }
  return tab.objective(cost);
}

double wasserstein1_lp(std::span<const double> xs, std::span<const double> as,
                       std::span<const double> ys, std::span<const double> bs) {
  const int p = static_cast<int>(xs.size());
  const int q = static_cast<int>(ys.size());
  const int n = p * q;
  std::vector<std::vector<double>> a;
  std::vector<double> rhs;
  for (int i = 0; i < p; ++i) {
    std::vector<double> row(n, 0.0);
    for (int j = 0; j < q; ++j) row[i * q + j] = 1.0;
    a.push_back(std::move(row));
    rhs.push_back(as[i]);
  }
  // The last column-sum constraint is implied by the others.
  for (int j = 0; j + 1 < q; ++j) {
    std::vector<double> row(n, 0.0);
    for (int i = 0; i < p; ++i) row[i * q + j] = 1.0;
    a.push_back(std::move(row));
    rhs.push_back(bs[j]);
  }
  std::vector<double> cost(n);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < q; ++j) cost[i * q + j] = std::abs(xs[i] - ys[j]);
  }
  return simplex_min(std::move(a), std::move(rhs), std::move(cost));
}

double wasserstein1_lp(const distctrl::DiscreteMeasure& m1, const distctrl::DiscreteMeasure& m2) {
  std::vector<double> xs, as, ys, bs;
  for (int j = 0; j < m1.size(); ++j) {
    if (m1.weight(j) > 0.0) {
      xs.push_back(m1.lattice().node(j));
      as.push_back(m1.weight(j));
    }
    if (m2.weight(j) > 0.0) {
      ys.push_back(m2.lattice().node(j));
      bs.push_back(m2.weight(j));
    }
  }
  return wasserstein1_lp(xs, as, ys, bs);
}

double enumerate_policy_min(const distctrl::StencilTable& st, std::span<const double> phi,
                            const distctrl::DiscreteMeasure& m0) {
  const auto& lat = st.lattice();
  const int cells = lat.nt * lat.nx;
  const int na = lat.n_controls();
  double total = std::pow(static_cast<double>(na), cells);
  if (total > 2e7) throw std::invalid_argument("policy enumeration instance too large");

  std::vector<int> policy(cells, 0);
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> cur(lat.nx), next(lat.nx);
  while (true) {
    for (int j = 0; j < lat.nx; ++j) cur[j] = m0.weight(j);
    for (int t = 0; t < lat.nt; ++t) {
      std::fill(next.begin(), next.end(), 0.0);
      for (int j = 0; j < lat.nx; ++j) {
        if (cur[j] == 0.0) continue;
        const auto& r = st.row(j, policy[t * lat.nx + j]);
        next[r.lo_plus] += r.w_plus * cur[j];
        next[r.lo_plus + 1] += (0.5 - r.w_plus) * cur[j];
        next[r.lo_minus] += r.w_minus * cur[j];
        next[r.lo_minus + 1] += (0.5 - r.w_minus) * cur[j];
      }
      std::swap(cur, next);
    }
    double value = 0.0;
    for (int j = 0; j < lat.nx; ++j) value += phi[j] * cur[j];
    best = std::min(best, value);

    int d = 0;
    while (d < cells && ++policy[d] == na) policy[d++] = 0;
    if (d == cells) break;
  }
  return best;
}

}  // namespace oracles
