#include <doctest.h>

#include <cmath>
#include <numbers>

#include "blowup/bubbles.hpp"
#include "blowup/error.hpp"
#include "helpers.hpp"

using namespace blowup;
using blowup::test::single_bubble;
using blowup::test::two_bubble;

namespace {

struct Setup {
  BlowupConfig cfg;
  GreenProvider gp = GreenProvider::analytic_disk();
  ScaleParams scales;
  CoefficientSet coeffs;
  PiercedDomain pd{DomainSpec::unit_disk(), {}, 0.0};
  std::shared_ptr<const Mesh> mesh;

  Setup(BlowupConfig c, double rho) : cfg(std::move(c)) {
    scales = choose_scales(cfg, rho, gp);
    coeffs = compute_coefficients(cfg, scales, gp);
    pd = build_pierced_domain(cfg.domain,
                              {cfg.points, std::vector<double>(scales.eps.data(), scales.eps.data() + cfg.count())});
    mesh = std::make_shared<const Mesh>(build_mesh(pd, MeshPolicy{}));
  }
};

}  // namespace

TEST_SUITE("bubbles") {

TEST_CASE("bubble values at the center and at r = delta") {
  const Bubble b{Vec2(0.1, -0.2), 3.0, 0.05, BubbleSign::Positive};
  const double peak = std::log(2 * 9.0 / std::pow(0.05, 3));
  CHECK(bubble_value(b, b.center) == doctest::Approx(peak).epsilon(1e-14));
  CHECK(bubble_value(b, b.center + Vec2(0.0, 0.05)) == doctest::Approx(peak - 2 * std::log(2.0)).epsilon(1e-13));
  // -Δw = r^{α-2} e^w, checked by a radial finite difference
  const double r = 0.03, h = 1e-5;
  const double lap = (b.value_r(r + h) - 2 * b.value_r(r) + b.value_r(r - h)) / (h * h) +
                     (b.value_r(r + h) - b.value_r(r - h)) / (2 * h * r);
  CHECK(-lap == doctest::Approx(b.source_r(r)).epsilon(1e-5));
}

TEST_CASE("kernel functions") {
  CHECK(kernel_Y(0, 3.0, Vec2(0, 0)) == 1.0);
  CHECK(kernel_Y(0, 3.0, Vec2(0.6, 0.8)) == doctest::Approx(0.0));
  CHECK(kernel_Y(0, 3.0, Vec2(1e4, 0)) == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(kernel_Y(1, 3.0, Vec2(1, 0)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(kernel_Y(2, 3.0, Vec2(1, 0)) == doctest::Approx(0.0));
  // θ = π/2: sin(3π/4)/2
  CHECK(kernel_Y(2, 3.0, Vec2(0, 1)) == doctest::Approx(std::sin(0.75 * std::numbers::pi) / 2).epsilon(1e-14));
  try {
    kernel_Y(1, 3.0, Vec2(0, 0));
    FAIL("expected UndefinedAngleAtOrigin");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UndefinedAngleAtOrigin);
  }
}

TEST_CASE("test functions") {
  const Setup s(single_bubble(), 1e-3);
  const TestFunctionSet t = test_eta(0, s.cfg, s.scales, s.coeffs);
  for (double r : {0.0, 1e-3, 0.03, 0.2, 0.9}) {
    REQUIRE(t.eta0(r) + 1.0 == doctest::Approx(-t.Z0(r)).epsilon(1e-13));
    REQUIRE(t.Z(r) == doctest::Approx(t.eta(r) + s.coeffs.gamma_star[0] * t.eta0(r)).epsilon(1e-13));
  }
  CHECK(t.Z0(0.0) == 1.0);
  CHECK(t.Z0(s.scales.delta[0]) == doctest::Approx(0.0));
}

TEST_CASE("far expansion is the stated linear combination") {
  const Setup s(two_bubble(), 1e-3);
  const Vec2 x(0.0, 0.6);
  const double direct = 4 * std::numbers::pi * 3.5 * s.gp.green(x, s.cfg.points[0]) -
                        s.coeffs.beta(0, 0) * s.gp.green(x, s.cfg.points[0]) -
                        s.coeffs.beta(0, 1) * s.gp.green(x, s.cfg.points[1]);
  CHECK(project_asymptotic(0, s.cfg, s.scales, s.coeffs, s.gp, x, Regime::Far, s.pd.eta()) ==
        doctest::Approx(direct).epsilon(1e-13));
  try {
    project_asymptotic(0, s.cfg, s.scales, s.coeffs, s.gp, Vec2(-0.35, 0), Regime::Far, s.pd.eta());
    FAIL("expected RegimeViolation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::RegimeViolation);
  }
}

TEST_CASE("near and far expansions meet on the annulus edge") {
  double last = std::numeric_limits<double>::infinity();
  for (double rho : {1e-2, 1e-3, 1e-4}) {
    const Setup s(single_bubble(), rho);
    const double eta = s.pd.eta();
    const Vec2 x(eta * std::cos(0.3), eta * std::sin(0.3));
    const double gap = std::abs(project_asymptotic(0, s.cfg, s.scales, s.coeffs, s.gp, x, Regime::Near, eta) -
                                project_asymptotic(0, s.cfg, s.scales, s.coeffs, s.gp, x, Regime::Far, eta));
    REQUIRE(gap < last);
    last = gap;
  }
  CHECK(last < 1e-3);
}

TEST_CASE("projections vanish on the boundary and match the far expansion") {
  const Setup s(two_bubble(), 1e-3);
  const DirichletSolver space(s.mesh);
  for (std::size_t i = 0; i < 2; ++i) {
    const Field p = project_numeric(i, s.cfg, s.scales, s.coeffs, s.gp, space);
    double far = 0.0;
    for (std::size_t n = 0; n < s.mesh->size(); ++n) {
      if (s.mesh->is_boundary(n)) {
        REQUIRE(std::abs(p.values[n]) < 1e-12);
        continue;
      }
      if (s.mesh->offset(n, 0).norm() <= s.pd.eta() || s.mesh->offset(n, 1).norm() <= s.pd.eta()) continue;
      far = std::max(far, std::abs(p.values[n] - project_asymptotic(i, s.cfg, s.scales, s.coeffs, s.gp,
                                                                    s.mesh->nodes[n], Regime::Far, s.pd.eta())));
    }
    CHECK(far < 1e-3);
  }
}

TEST_CASE("lifted and purely discrete projections agree to discretization error") {
  const Setup s(single_bubble(), 1e-2);
  const DirichletSolver space(s.mesh);
  const auto bubbles = make_bubbles(s.cfg, s.scales);
  const Field lifted = project_numeric(0, s.cfg, s.scales, s.coeffs, s.gp, space);
  const Field plain = project_numeric(bubbles[0], 0, space);
  const double peak = lifted.values.maxCoeff();
  CHECK((lifted.values - plain.values).cwiseAbs().maxCoeff() < 0.05 * peak);
}

TEST_CASE("U combines the projections with the sign split") {
  const Setup s(two_bubble(3.5, 2.0), 1e-3);
  const DirichletSolver space(s.mesh);
  std::vector<Field> p;
  for (std::size_t i = 0; i < 2; ++i) p.push_back(project_numeric(i, s.cfg, s.scales, s.coeffs, s.gp, space));
  const Field U = assemble_U(p, s.cfg);
  CHECK((U.values - (p[0].values - 0.5 * p[1].values)).cwiseAbs().maxCoeff() < 1e-12);
  try {
    assemble_U({p[0]}, s.cfg);
    FAIL("expected MeshMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MeshMismatch);
  }
}

}
