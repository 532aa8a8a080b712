#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "blowup/error.hpp"
#include "blowup/greens.hpp"

using namespace blowup;

namespace {

constexpr double kG05 = 0.110318;  // -(1/2π) log 0.5

Vec2 random_point(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = radius * std::sqrt(u(rng)), t = 2.0 * std::numbers::pi * u(rng);
  return Vec2(r * std::cos(t), r * std::sin(t));
}

}  // namespace

TEST_SUITE("greens") {

TEST_CASE("disk Green function at the center") {
  const auto gp = GreenProvider::analytic_disk();
  CHECK(gp.green(Vec2(0.5, 0), Vec2(0, 0)) == doctest::Approx(kG05).epsilon(1e-5));
  CHECK(gp.robin_H(Vec2(0, 0), Vec2(0, 0)) == doctest::Approx(0.0));
  const auto num = GreenProvider::numeric(DomainSpec::unit_disk(), 0.02);
  CHECK(std::abs(num.green(Vec2(0.5, 0), Vec2(0, 0)) - kG05) < 1e-3);
  CHECK(std::abs(num.robin_H(Vec2(0, 0), Vec2(0, 0))) < 1e-3);
}

TEST_CASE("errors") {
  const auto gp = GreenProvider::analytic_disk();
  CHECK_THROWS_AS(gp.green(Vec2(0.2, 0.1), Vec2(0.2, 0.1)), Error);
  try {
    gp.green(Vec2(0.2, 0.1), Vec2(0.2, 0.1));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::CoincidentPoints);
  }
  try {
    gp.green(Vec2(1.2, 0.0), Vec2(0.2, 0.1));
    FAIL("expected PointOutsideDomain");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::PointOutsideDomain);
  }
}

TEST_CASE("Dirichlet condition and the regular part on the boundary") {
  const auto gp = GreenProvider::analytic_disk();
  std::mt19937_64 rng(11);
  for (int k = 0; k < 50; ++k) {
    const Vec2 y = random_point(rng, 0.9);
    const double t = 0.37 * k;
    const Vec2 x(std::cos(t), std::sin(t));
    REQUIRE(std::abs(gp.green(x, y)) < 1e-10);
    REQUIRE(gp.robin_H(x, y) == doctest::Approx(std::log((x - y).norm()) / (2 * std::numbers::pi)).epsilon(1e-10));
  }
}

TEST_CASE("symmetry and positivity") {
  const auto gp = GreenProvider::analytic_disk();
  std::mt19937_64 rng(5);
  for (int k = 0; k < 200; ++k) {
    const Vec2 x = random_point(rng, 0.95), y = random_point(rng, 0.95);
    REQUIRE(gp.green(x, y) == doctest::Approx(gp.green(y, x)).epsilon(1e-12));
    REQUIRE(gp.green(x, y) > 0.0);
  }
}

TEST_CASE("numeric backend converges at second order") {
  const auto exact = GreenProvider::analytic_disk();
  double err[2] = {0, 0};
  const double hs[2] = {0.04, 0.02};
  for (int j = 0; j < 2; ++j) {
    const auto num = GreenProvider::numeric(DomainSpec::unit_disk(), hs[j]);
    std::mt19937_64 rng(2);
    for (int k = 0; k < 40; ++k) {
      const Vec2 x = random_point(rng, 0.75), y = random_point(rng, 0.75);
      err[j] = std::max(err[j], std::abs(num.green(x, y) - exact.green(x, y)));
    }
  }
  CHECK(err[1] < 1e-3);
  CHECK(err[0] / err[1] > 3.0);
}

TEST_CASE("radial profile from the center") {
  const auto gp = GreenProvider::analytic_disk();
  const GreenProfile prof = gp.green_gradient_profile(Vec2(0, 0), Vec2(0, 1), 1e-3, 65);
  REQUIRE(prof.t.size() == 65);
  CHECK(prof.t.front() == doctest::Approx(1e-3));
  CHECK(prof.t.back() == doctest::Approx(1.0));
  CHECK(std::abs(prof.value.back()) < 1e-12);
  for (std::size_t k = 0; k < prof.t.size(); ++k)
    REQUIRE(prof.value[k] == doctest::Approx(-std::log(prof.t[k]) / (2 * std::numbers::pi)).epsilon(1e-12));
  // t = 0.5 is not on the grid; the closest samples bracket the oracle.
  double below = 0, above = 0;
  for (std::size_t k = 0; k + 1 < prof.t.size(); ++k)
    if (prof.t[k] <= 0.5 && prof.t[k + 1] > 0.5) {
      below = prof.value[k + 1];
      above = prof.value[k];
    }
  CHECK(below <= kG05);
  CHECK(above >= kG05);
}

}
