#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "blowup/error.hpp"
#include "helpers.hpp"

using namespace blowup;
using blowup::test::single_bubble;
using blowup::test::two_bubble;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_SUITE("coeffs") {

TEST_CASE("rho_i for one centered bubble vanishes") {
  const auto gp = GreenProvider::analytic_disk();
  CHECK(compute_rho_i(single_bubble(), gp)[0] == doctest::Approx(0.0));
}

TEST_CASE("rho_i for the symmetric mixed pair") {
  const auto gp = GreenProvider::analytic_disk();
  const auto rho = compute_rho_i(two_bubble(3.0), gp);
  // H(ξ₁,ξ₁) = log(1 - 0.16)/2π, G(ξ₁,ξ₂) = (log 1.16 - log 0.8)/2π
  const double H11 = std::log(0.84) / (2 * kPi), G12 = (std::log(1.16) - std::log(0.8)) / (2 * kPi);
  CHECK(rho[0] == doctest::Approx(5 * H11 - 5 * G12).epsilon(1e-12));
  CHECK(rho[1] == doctest::Approx(5 * H11 - 5 * G12).epsilon(1e-12));
}

TEST_CASE("swapping the groups exchanges the formulas") {
  const auto gp = GreenProvider::analytic_disk();
  BlowupConfig a = two_bubble(3.0);
  a.points = {Vec2(-0.4, 0.1), Vec2(0.3, 0.0)};
  a.alphas = {3.0, 3.4};
  BlowupConfig b = a;
  b.m1 = 0;
  const auto ra = compute_rho_i(a, gp), rb = compute_rho_i(b, gp);
  // With τ = 1 the cross term changes sign when the first point joins the other group.
  const double G12 = gp.green(a.points[0], a.points[1]);
  CHECK(ra[0] - rb[0] == doctest::Approx(-2 * (3.4 + 2) * G12).epsilon(1e-12));
  CHECK(ra[1] - rb[1] == doctest::Approx(-2 * (3.0 + 2) * G12).epsilon(1e-12));
}

TEST_CASE("scales for one centered bubble") {
  const auto gp = GreenProvider::analytic_disk();
  const ScaleParams s = choose_scales(single_bubble(), 1e-3, gp);
  CHECK(s.d[0] == doctest::Approx(1.0 / 18.0).epsilon(1e-14));
  CHECK(s.delta[0] == doctest::Approx(std::cbrt(1e-3 / 18.0)).epsilon(1e-13));
  CHECK(s.eps[0] == doctest::Approx(std::pow(1e-3 / 18.0, 2)).epsilon(1e-12));
}

TEST_CASE("potential vanishing at a point") {
  BlowupConfig c = single_bubble();
  c.V1 = Expression::parse("x");
  try {
    choose_scales(c, 1e-3, GreenProvider::analytic_disk());
    FAIL("expected NonpositivePotentialAtCenter");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonpositivePotentialAtCenter);
  }
}

TEST_CASE("beta and gamma for one centered bubble") {
  const auto gp = GreenProvider::analytic_disk();
  const BlowupConfig c = single_bubble();
  const ScaleParams s = choose_scales(c, 1e-3, gp);
  const CoefficientSet k = compute_coefficients(c, s, gp);
  const double le = std::log(s.eps[0]);
  CHECK(k.beta(0, 0) == doctest::Approx(4 * kPi * 3 * std::log(s.delta[0]) / le).epsilon(1e-12));
  CHECK(k.beta(0, 0) == doctest::Approx(2 * kPi).epsilon(1e-12));
  CHECK(k.gamma(0, 0) == doctest::Approx(-4 * kPi / le).epsilon(1e-12));
  CHECK(k.beta_residual < 1e-12);
  CHECK(k.diagonally_dominant);
}

TEST_CASE("beta approaches its diagonal leading term") {
  const auto gp = GreenProvider::analytic_disk();
  const BlowupConfig c = two_bubble(3.5);
  for (double rho : {1e-2, 1e-4, 1e-6}) {
    const ScaleParams s = choose_scales(c, rho, gp);
    const Eigen::MatrixXd b = solve_beta(c, s, gp);
    for (int i = 0; i < 2; ++i) {
      const double lead = 4 * kPi * c.alphas[i] * std::log(s.delta[i]) / std::log(s.eps[i]);
      // O(1/|log ε|) with a bounded constant
      REQUIRE(std::abs(b(i, i) - lead) * std::abs(std::log(s.eps[i])) < 50.0);
    }
  }
}

TEST_CASE("off-diagonal beta fades relative to the diagonal") {
  const auto gp = GreenProvider::analytic_disk();
  const BlowupConfig c = two_bubble(3.5);
  double last = std::numeric_limits<double>::infinity();
  for (double rho : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
    const Eigen::MatrixXd b = solve_beta(c, choose_scales(c, rho, gp), gp);
    const double ratio = std::abs(b(0, 1) / b(0, 0));
    REQUIRE(ratio < last);
    last = ratio;
  }
}

TEST_CASE("constraint holds under the chosen scales") {
  const auto gp = GreenProvider::analytic_disk();
  BlowupConfig c = two_bubble(3.5, 1.7);
  c.points = {Vec2(-0.3, 0.2), Vec2(0.4, -0.1)};
  c.alphas = {3.3, 2.7};
  for (double rho : {1e-2, 1e-4}) {
    const Eigen::VectorXd dev = constraint_deviation(c, solve_beta(c, choose_scales(c, rho, gp), gp));
    for (int i = 0; i < 2; ++i) REQUIRE(std::abs(dev[i]) < 1e-10);
  }
}

TEST_CASE("gamma star grows like a third of (alpha - 2) times |log rho|") {
  const auto gp = GreenProvider::analytic_disk();
  for (const BlowupConfig& c : {single_bubble(3.0), two_bubble(3.5)}) {
    std::vector<double> lr, g;
    for (double rho : {1e-3, 1e-4, 1e-5, 1e-6}) {
      const auto gs = solve_gamma(c, choose_scales(c, rho, gp), gp);
      lr.push_back(std::log(rho));
      g.push_back(gs.gamma_star[0]);
    }
    const double slope = (g.back() - g.front()) / (lr.back() - lr.front());
    const double target = -(c.alphas[0] - 2.0) / 3.0;
    CHECK(std::abs(slope - target) <= 0.05 * std::abs(target));
  }
}

TEST_CASE("dominance threshold exists for a well separated pair") {
  const auto gp = GreenProvider::analytic_disk();
  const auto t = dominance_threshold(two_bubble(3.5), gp);
  REQUIRE(t.has_value());
  CHECK(systems_dominant(two_bubble(3.5), choose_scales(two_bubble(3.5), *t / 10.0, gp), gp));
}

TEST_CASE("coefficient CSV") {
  const auto gp = GreenProvider::analytic_disk();
  const BlowupConfig c = two_bubble();
  std::ostringstream os;
  compute_coefficients(c, choose_scales(c, 1e-3, gp), gp).write_csv(os);
  const std::string s = os.str();
  CHECK(s.rfind("matrix,row,col,value\n", 0) == 0);
  CHECK(s.find("beta,1,2,") != std::string::npos);
  CHECK(s.find("gamma_star,") != std::string::npos);
}

TEST_CASE("model assumptions") {
  BlowupConfig c = single_bubble(4.0);
  c.tau = -1.0;
  try {
    c.validate();
    FAIL("expected ConstraintViolation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ConstraintViolation);
    const std::string msg = e.what();
    CHECK(msg.find("α_i ∉ 2ℕ") != std::string::npos);
    CHECK(msg.find("τ > 0") != std::string::npos);
  }
  CHECK_THROWS_AS(single_bubble(1.5).validate(), Error);
  CHECK_NOTHROW(single_bubble(4.0 + 1e-6).validate());
  CHECK_THROWS_AS(single_bubble(4.0 + 1e-10).validate(), Error);
}

}
