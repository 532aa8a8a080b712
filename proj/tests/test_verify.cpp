#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "blowup/error.hpp"
#include "blowup/suite.hpp"
#include "helpers.hpp"

using namespace blowup;
using blowup::test::single_bubble;
using blowup::test::two_bubble;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_SUITE("verify") {

TEST_CASE("integral identities") {
  for (const auto& id : check_integral_identities({2.5, 3.0, 3.7})) {
    CHECK(id.y0_squared == doctest::Approx(4 * kPi * id.alpha / 3).epsilon(1e-10));
    CHECK(id.y0_log == doctest::Approx(-4 * kPi).epsilon(1e-10));
    CHECK(id.rel_error_squared <= 1e-8);
    CHECK(id.rel_error_log <= 1e-8);
  }
}

TEST_CASE("kernel functions solve the linearized equation") {
  const auto rows = check_kernel_annihilation({3.0}, 2e-3);
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) CHECK(r.relative_residual < 1e-4);
  // Second-order differences: halving the spacing quarters the residual.
  const auto fine = check_kernel_annihilation({3.0}, 1e-3);
  CHECK(rows[0].relative_residual / fine[0].relative_residual == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("scaling fits need three samples") {
  CHECK_THROWS_AS(fit_scaling({1e-2, 1e-3}, {1.0, 0.5}), Error);
  try {
    check_residual_scaling(single_bubble(), {1e-2, 1e-3}, {1.01}, GreenProvider::analytic_disk(), MeshPolicy{});
    FAIL("expected InsufficientSamples");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InsufficientSamples);
  }
  const ScalingStudy s = fit_scaling({1e-2, 1e-3, 1e-4}, {1e-1, 1e-2 * std::sqrt(10.0), 1e-2});
  CHECK(s.fit.slope == doctest::Approx(0.5));
}

TEST_CASE("expansion error decays for one and two bubbles") {
  const auto gp = GreenProvider::analytic_disk();
  for (const BlowupConfig& c : {single_bubble(), two_bubble()}) {
    for (std::size_t i = 0; i < c.count(); ++i) {
      const ScalingStudy s = check_projection_expansion(c, i, {1e-2, 1e-3, 1e-4}, gp, MeshPolicy{});
      CHECK(s.fit.slope > 0.5);
      CHECK(strictly_decreasing(s.values));
    }
  }
}

TEST_CASE("operator bound is reproducible for a fixed seed") {
  const auto gp = GreenProvider::analytic_disk();
  const auto a = check_operator_bound(single_bubble(), {1e-2, 1e-3, 1e-4}, 3, 42, 1.01, gp, MeshPolicy{});
  const auto b = check_operator_bound(single_bubble(), {1e-2, 1e-3, 1e-4}, 3, 42, 1.01, gp, MeshPolicy{});
  CHECK(a.amplification == b.amplification);
  CHECK(a.spread <= 10.0);
  CHECK(a.spread >= 1.0);
  // The kernel-shaped datum is amplified far more than white noise.
  for (std::size_t k = 0; k < a.rho.size(); ++k) CHECK(a.kernel_amplification[k] > a.amplification[k]);
}

TEST_CASE("far-field profile and sign structure of a converged solution") {
  const auto gp = GreenProvider::analytic_disk();
  const Solution s = construct_solution(single_bubble(), 1e-3, gp, MeshPolicy{}, SolverOptions{});
  const FarFieldReport f = check_farfield_profile(s, gp, Vec2(0.5, 0));
  CHECK(f.target == doctest::Approx(5 * std::log(2.0)).epsilon(1e-12));
  CHECK(f.point_error < 0.01);
  CHECK(f.max_error < 0.01);
  CHECK(sign_margins(s)[0] > 0.0);
  CHECK(check_kernel_coefficients(s)[0] == doctest::Approx(s.report.kernel_a[0]));
}

TEST_CASE("constraint study") {
  const auto c = check_constraint(two_bubble(), {1e-2, 1e-3}, GreenProvider::analytic_disk());
  for (double d : c.deviation) CHECK(d < 1e-12);
}

TEST_CASE("Green fidelity against the disk formula") {
  const GreenFidelity g = check_green_fidelity(20, 3, 0.04);
  CHECK(g.error_fine < g.error_coarse);
  CHECK(g.ratio > 3.0);
}

TEST_CASE("sequence helpers") {
  CHECK(strictly_decreasing({3, 2, 1}));
  CHECK_FALSE(strictly_decreasing({3, 3, 1}));
  CHECK(strictly_increasing({1, 2, 3}));
  CHECK_FALSE(strictly_increasing({1, 2, 2}));
  CHECK(non_increasing_above({1e-16, 2e-16, 1e-16}, 1e-13));
  CHECK_FALSE(non_increasing_above({1e-3, 2e-3}, 1e-13));
}

TEST_CASE("check report CSV and selection") {
  CheckReport r;
  r.add({"a.x", 1e-3, 1.01, 0.5, 1.0, true, "t"});
  r.add({"b.y", std::nan(""), std::nan(""), 2.0, 1.0, false, "t"});
  CHECK_FALSE(r.all_pass());
  CHECK(select(r, "a.").all_pass());
  std::ostringstream os;
  r.write_csv(os);
  CHECK(os.str() == "check_id,rho,p,measured,threshold,pass\na.x,0.001,1.01,0.5,1,true\nb.y,,,2,1,false\n");
}

}
