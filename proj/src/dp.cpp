#include "distctrl/dp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace distctrl {

ControlField ControlField::constant(const Lattice& lat, double u) {
  auto it = std::find(lat.controls.begin(), lat.controls.end(), u);
  if (it == lat.controls.end()) {
    throw std::invalid_argument("constant feedback value is not a grid control");
  }
  ControlField f(lat.nt, lat.nx);
  std::fill(f.idx.begin(), f.idx.end(),
            static_cast<int32_t>(it - lat.controls.begin()));
  return f;
}

namespace {

inline void bellman_node(const StencilTable& st, const double* vn, int j, int na, double& v_out,
                         int32_t& a_out) {
  double best = std::numeric_limits<double>::infinity();
  int32_t best_a = 0;
  for (int a = 0; a < na; ++a) {
    const StencilRow& r = st.row(j, a);
    const double e = r.w_plus * vn[r.lo_plus] + (0.5 - r.w_plus) * vn[r.lo_plus + 1] +
                     r.w_minus * vn[r.lo_minus] + (0.5 - r.w_minus) * vn[r.lo_minus + 1];
    if (e < best) {
      best = e;
      best_a = static_cast<int32_t>(a);
    }
  }
  v_out = best;
  a_out = best_a;
}

}  // namespace

void backward_step_serial(const StencilTable& st, std::span<const double> v_next,
                          std::span<double> v_out, std::span<int32_t> ctrl_out) {
  const int nx = st.lattice().nx;
  const int na = st.lattice().n_controls();
  const double* vn = v_next.data();
  for (int j = 0; j < nx; ++j) bellman_node(st, vn, j, na, v_out[j], ctrl_out[j]);
}

void backward_step_parallel(const StencilTable& st, std::span<const double> v_next,
                            std::span<double> v_out, std::span<int32_t> ctrl_out) {
  const int nx = st.lattice().nx;
  const int na = st.lattice().n_controls();
  const double* vn = v_next.data();
#pragma omp parallel for schedule(static)
  for (int j = 0; j < nx; ++j) bellman_node(st, vn, j, na, v_out[j], ctrl_out[j]);
}

std::pair<ValueField, ControlField> hjb_backward(const StencilTable& st,
                                                 std::span<const double> phi, Exec exec) {
  const Lattice& lat = st.lattice();
  if (static_cast<int>(phi.size()) != lat.nx) {
    throw ShapeError("terminal cost length does not match lattice node count");
  }
  for (double v : phi) {
    if (std::isnan(v)) throw std::invalid_argument("terminal cost contains NaN");
  }
  ValueField vf(lat.nt, lat.nx);
  ControlField cf(lat.nt, lat.nx);
  std::copy(phi.begin(), phi.end(), vf.slice(lat.nt).begin());
  for (int t = lat.nt - 1; t >= 0; --t) {
    auto vn = vf.slice(t + 1);
    auto vo = vf.slice(t);
    std::span<int32_t> co{cf.idx.data() + static_cast<size_t>(t) * lat.nx,
                          static_cast<size_t>(lat.nx)};
    if (exec == Exec::parallel) backward_step_parallel(st, vn, vo, co);
    else backward_step_serial(st, vn, vo, co);
  }
  return {std::move(vf), std::move(cf)};
}

std::vector<DiscreteMeasure> push_forward(const DiscreteMeasure& m0, const ControlField& feedback,
                                          const StencilTable& st) {
  const Lattice& lat = st.lattice();
  if (m0.lattice_ptr() != st.lattice_ptr()) {
    throw ShapeError("initial measure lives on a different lattice");
  }
  if (feedback.nt != lat.nt || feedback.nx != lat.nx) {
    throw ShapeError("feedback field does not match lattice");
  }
  std::vector<DiscreteMeasure> out;
  out.reserve(lat.nt + 1);
  out.push_back(m0);
  std::vector<double> next(lat.nx);
  for (int t = 0; t < lat.nt; ++t) {
    const DiscreteMeasure& cur = out.back();
    std::fill(next.begin(), next.end(), 0.0);
    for (int j = 0; j < lat.nx; ++j) {
      const double mj = cur.weight(j);
      if (mj == 0.0) continue;
      const StencilRow& r = st.row(j, feedback.at(t, j));
      next[r.lo_plus] += r.w_plus * mj;
      next[r.lo_plus + 1] += (0.5 - r.w_plus) * mj;
      next[r.lo_minus] += r.w_minus * mj;
      next[r.lo_minus + 1] += (0.5 - r.w_minus) * mj;
    }
    out.push_back(DiscreteMeasure::from_push(m0.lattice_ptr(), next));
  }
  return out;
}

StandardSolution solve_standard(std::span<const double> phi, const DiscreteMeasure& m0,
                                const StencilTable& st, Exec exec) {
  auto [vf, cf] = hjb_backward(st, phi, exec);
  auto flow = push_forward(m0, cf, st);
  const double value = moment(m0, vf.slice(0));
  DiscreteMeasure terminal = flow.back();
  return StandardSolution{value, std::move(terminal), std::move(cf), std::move(vf),
                          std::move(flow)};
}

}  // namespace distctrl
