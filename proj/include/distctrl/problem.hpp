#pragma once

#include <memory>

#include "distctrl/dp.hpp"
#include "distctrl/functionals.hpp"
#include "distctrl/lattice.hpp"
#include "distctrl/measure.hpp"

namespace distctrl {

/// A fully discretized constrained problem instance: cost/constraint
/// functionals, transition kernel, and the chain's initial distribution.
struct Problem {
  StencilTable stencils;
  MomentFunctional cost;        // scalar
  MomentFunctional constraint;  // one output per constraint
  DiscreteMeasure initial;
  Exec exec = Exec::parallel;

  const Lattice& lattice() const { return stencils.lattice(); }
  const std::shared_ptr<const Lattice>& lattice_ptr() const { return stencils.lattice_ptr(); }
  int n_constraints() const { return constraint.outputs; }
};

}  // namespace distctrl
