#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "blowup/corrector.hpp"
#include "blowup/error.hpp"
#include "helpers.hpp"

using namespace blowup;
using blowup::test::single_bubble;
using blowup::test::two_bubble;

namespace {

/// Peak of P w over A₁ for one centered bubble with α = 3: U ≈ -2log(δ³ + r³) + log r,
/// maximal at r³ = δ³/5.
double peak_oracle(double delta) { return -5 * std::log(delta) - 2 * std::log(1.2) - std::log(5.0) / 3; }

}  // namespace

TEST_SUITE("corrector") {

TEST_CASE("zero residual gives a zero correction in one step") {
  const auto gp = GreenProvider::analytic_disk();
  ProblemInstance inst = build_instance(single_bubble(), 1e-3, gp, MeshPolicy{});
  inst.R.values.setZero();
  const Correction c = fixed_point_correct(inst, SolverOptions{});
  CHECK(c.report.status == SolveStatus::Converged);
  CHECK(c.report.iterations == 1);
  CHECK(c.phi.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("single bubble at rho = 1e-3") {
  const auto gp = GreenProvider::analytic_disk();
  const Solution s = construct_solution(single_bubble(), 1e-3, gp, MeshPolicy{}, SolverOptions{});
  const SolveReport& r = s.report;
  REQUIRE(r.status == SolveStatus::Converged);
  CHECK(r.iterations <= 50);
  CHECK(r.contraction_factor < 1.0);
  CHECK(r.pde_residual_relative < 1e-6);
  REQUIRE(r.newton_agreement.has_value());
  CHECK(*r.newton_agreement < 1e-8);
  CHECK(r.peaks[0] == doctest::Approx(peak_oracle(s.instance.scales.delta[0])).epsilon(0.01));
  CHECK(r.peaks[0] > std::log(324000.0));  // leading term log(2α²/δ^α)
  CHECK(r.far_target == doctest::Approx(3.4657).epsilon(1e-4));
  CHECK(std::abs(r.far_value - r.far_target) < 0.01);
  CHECK(r.phi_sup < 1e-3);
  CHECK(s.u.tag == BoundaryTag::DirichletZero);
  for (std::size_t n = 0; n < s.instance.mesh->size(); ++n)
    if (s.instance.mesh->is_boundary(n)) REQUIRE(std::abs(s.u.values[n]) < 1e-12);
}

TEST_CASE("Newton and fixed point agree from the same start") {
  const auto gp = GreenProvider::analytic_disk();
  const ProblemInstance inst = build_instance(two_bubble(), 1e-3, gp, MeshPolicy{});
  const Correction a = fixed_point_correct(inst, SolverOptions{});
  const Correction b = newton_correct(inst, SolverOptions{});
  REQUIRE(a.report.status == SolveStatus::Converged);
  REQUIRE(b.report.status == SolveStatus::Converged);
  CHECK(b.report.iterations <= a.report.iterations);
  CHECK((a.phi.values - b.phi.values).cwiseAbs().maxCoeff() < 1e-8);
  // Relative to the size of the source term, which reaches O(δ⁻²) in the cores.
  const Field u(inst.mesh, inst.U.values + a.phi.values);
  CHECK(norm_sup(pde_residual(inst, a.phi)) < 1e-8 * norm_sup(nonlinearity_f(u, inst.cfg, inst.scales)));
}

TEST_CASE("iteration cap is reported") {
  const auto gp = GreenProvider::analytic_disk();
  const ProblemInstance inst = build_instance(single_bubble(), 1e-2, gp, MeshPolicy{});
  SolverOptions opt;
  opt.maxiter = 1;
  opt.tol = 1e-300;
  const Correction c = fixed_point_correct(inst, opt);
  CHECK(c.report.status != SolveStatus::Converged);
  CHECK(!c.report.message.empty());
}

TEST_CASE("negative Liouville case") {
  const auto gp = GreenProvider::analytic_disk();
  BlowupConfig c = single_bubble();
  c.m1 = 0;
  c.V1 = Expression::constant(0.0);
  const Solution s = construct_solution(c, 1e-3, gp, MeshPolicy{}, SolverOptions{});
  REQUIRE(s.report.status == SolveStatus::Converged);
  CHECK(s.report.peaks[0] < 0.0);
  CHECK(s.report.far_target == doctest::Approx(-3.4657).epsilon(1e-4));
}

TEST_CASE("far-field target scales the negative group by 1/tau") {
  const auto gp = GreenProvider::analytic_disk();
  SolverOptions opt;
  opt.newton_check = false;
  opt.far_point = Vec2(0.0, 0.6);
  const Solution s = construct_solution(two_bubble(3.5, 2.0), 1e-3, gp, MeshPolicy{}, opt);
  const double g1 = gp.green(opt.far_point, Vec2(-0.4, 0)), g2 = gp.green(opt.far_point, Vec2(0.4, 0));
  CHECK(s.report.far_target == doctest::Approx(2 * std::numbers::pi * 5.5 * (g1 - g2 / 2.0)).epsilon(1e-12));
}

TEST_CASE("sweeps") {
  const auto gp = GreenProvider::analytic_disk();
  SolverOptions opt;
  opt.newton_check = false;
  const SweepResult one = continuation_sweep(single_bubble(), {1e-3}, gp, MeshPolicy{}, opt);
  CHECK(one.reports.size() == 1);
  CHECK(one.insufficient_data);
  CHECK(one.sigma_p.empty());
  std::ostringstream os;
  one.reports[0].write_record(os);
  CHECK(os.str().find("sigma_p=insufficient-data") != std::string::npos);

  // ε = (ρ/18)² is below the meshable scale at ρ = 1e-6.
  const SweepResult mid = continuation_sweep(single_bubble(), {1e-2, 1e-6, 1e-3}, gp, MeshPolicy{}, opt, true);
  REQUIRE(mid.reports.size() == 3);
  CHECK(mid.reports[0].status == SolveStatus::Converged);
  CHECK(mid.reports[1].status == SolveStatus::Failed);
  CHECK(mid.reports[1].message.find("UnresolvableHole") != std::string::npos);
  CHECK(mid.reports[2].status == SolveStatus::Converged);
  CHECK(mid.solutions.size() == 2);
}

TEST_CASE("report formats") {
  const auto gp = GreenProvider::analytic_disk();
  const Solution s = construct_solution(single_bubble(), 1e-2, gp, MeshPolicy{}, SolverOptions{});
  std::ostringstream rec, hist;
  s.report.write_record(rec);
  s.report.write_history_csv(hist);
  CHECK(rec.str().find("status=converged\n") != std::string::npos);
  CHECK(rec.str().find("R_norm_p1.01=") != std::string::npos);
  CHECK(hist.str().rfind("iteration,update_h01,phi_sup,phi_h01,factor\n", 0) == 0);
  const std::string h = hist.str();
  CHECK(std::count(h.begin(), h.end(), '\n') == s.report.iterations + 1);
}

TEST_CASE("line fit") {
  const LineFit f = fit_line({0, 1, 2, 3}, {1, 3, 5, 7});
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.r2 == doctest::Approx(1.0));
}

}
