#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "distctrl/alm.hpp"
#include "distctrl/diagnostics.hpp"
#include "distctrl/run.hpp"

using namespace distctrl;

namespace {

Problem coarse_problem(const std::string& name) {
  RunConfig cfg;
  cfg.problem = name;
  return build_problem(cfg);
}

}  // namespace

TEST_CASE("complementarity defects") {
  const double tol = 1e-8;
  CHECK(complementarity_check(std::vector{-1.0}, std::vector{0.0}, tol) ==
        std::vector<double>{0.0});
  CHECK(complementarity_check(std::vector{-1.0}, std::vector{2.0}, tol) ==
        std::vector<double>{2.0});
  CHECK(complementarity_check(std::vector{0.0}, std::vector{2.0}, tol) ==
        std::vector<double>{0.0});
  CHECK_THROWS_AS(complementarity_check(std::vector{0.0, 1.0}, std::vector{1.0}, tol),
                  ShapeError);
}

TEST_CASE("vi residual vanishes at a standard-problem optimum") {
  auto problem = coarse_problem("expectation_floor");
  const std::vector<double> lambda = {1.5};
  // The final-time law of the solve for this representative is itself optimal
  // (the representative does not depend on the measure).
  auto rep = lagrangian_rep(problem.cost, problem.constraint, problem.initial, lambda);
  auto sol = solve_standard(rep, problem.initial, problem.stencils);
  const double vi = vi_residual(sol.terminal, lambda, problem);
  CHECK(std::abs(vi) <= 1e-10);
}

TEST_CASE("vi residual is non-negative on reachable measures") {
  auto problem = coarse_problem("variance_cap");
  // Push a few arbitrary feedbacks forward; each terminal law is reachable.
  for (double u : {-2.0, 0.0, 2.0}) {
    auto flow = push_forward(problem.initial, ControlField::constant(problem.lattice(), u),
                             problem.stencils);
    const std::vector<double> lambda = {0.7};
    CHECK(vi_residual(flow.back(), lambda, problem) >= -1e-10);
  }
}

TEST_CASE("vi residual is shift-invariant in the representative") {
  auto problem = coarse_problem("variance_cap");
  auto flow = push_forward(problem.initial, ControlField::constant(problem.lattice(), -2.0),
                           problem.stencils);
  const std::vector<double> lambda = {0.7};
  const double base = vi_residual(flow.back(), lambda, problem);

  Problem shifted{build_stencils(problem.lattice_ptr(), drift_controlled_dynamics()),
                  problem.cost, problem.constraint, problem.initial};
  auto orig_psi = problem.cost.psi;
  shifted.cost.psi = [orig_psi](std::span<const double> mom, std::span<double> out) {
    orig_psi(mom, out);
    out[0] += 42.0;  // constant shift of the cost; representative unchanged
  };
  const double shifted_vi = vi_residual(flow.back(), lambda, shifted);
  CHECK(base == doctest::Approx(shifted_vi).epsilon(1e-12));
}

TEST_CASE("gap bound guards its preconditions") {
  auto problem = coarse_problem("expectation_floor");
  auto report = outer_loop(problem, AlmConfig{1e-4, 1e-4});
  REQUIRE(report.converged);

  SUBCASE("converged run certifies a small gap") {
    // The activity band must dominate the drift between the inner mixture
    // and the recovered feedback's terminal law, so it is wider than the
    // stopping tolerance.
    const double bound = gap_bound(report.m_bar, report.lambda_bar, problem, 1e-2);
    CHECK(bound >= -1e-10);
    CHECK(bound <= 1e-4);
  }
  SUBCASE("negative multiplier components are refused") {
    const std::vector<double> bad = {-0.5};
    CHECK_THROWS_AS(gap_bound(report.m_bar, bad, problem, 1e-3), CertificateRefused);
  }
  SUBCASE("non-convex flags are refused") {
    Problem flagged{build_stencils(problem.lattice_ptr(), drift_controlled_dynamics()),
                    problem.cost, problem.constraint, problem.initial};
    flagged.constraint.convex = false;
    CHECK_THROWS_AS(gap_bound(report.m_bar, report.lambda_bar, flagged, 1e-3),
                    CertificateRefused);
  }
  SUBCASE("violated complementarity is refused") {
    // Same measure, but a large multiplier on a strictly inactive constraint.
    Problem slack_prob{build_stencils(problem.lattice_ptr(), drift_controlled_dynamics()),
                       problem.cost, expectation_floor_constraint(0.01), problem.initial};
    const std::vector<double> lambda = {3.0};
    CHECK_THROWS_AS(gap_bound(report.m_bar, lambda, slack_prob, 1e-3), CertificateRefused);
  }
}

TEST_CASE("certificate assembly records refusals instead of failing") {
  RunConfig cfg;
  cfg.problem = "variance_cap";
  cfg.alpha = 100.0;  // constraint far from active
  auto problem = build_problem(cfg);
  auto flow = push_forward(problem.initial, ControlField::constant(problem.lattice(), -2.0),
                           problem.stencils);
  // Inactive-but-multiplied: complementarity defect, so no gap bound.
  const std::vector<double> lambda = {2.0};
  auto cert = make_certificate(flow.back(), lambda, problem, 1e-6);
  CHECK(cert.vi_residual >= -1e-10);
  CHECK(cert.multiplier == lambda);
  CHECK(cert.constraint_values[0] < 0.0);
  CHECK_FALSE(cert.gap_bound.has_value());
  CHECK(cert.gap_refusal == "complementarity defect exceeds tolerance");

  // A clean multiplier on the same measure gets a bound.
  const std::vector<double> zero = {0.0};
  auto ok = make_certificate(flow.back(), zero, problem, 1e-6);
  CHECK(ok.gap_bound.has_value());
  CHECK(*ok.gap_bound == ok.vi_residual);
}
