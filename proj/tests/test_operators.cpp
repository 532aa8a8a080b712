#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "blowup/corrector.hpp"
#include "blowup/error.hpp"
#include "blowup/operators.hpp"
#include "helpers.hpp"

using namespace blowup;
using blowup::test::disk_mesh;
using blowup::test::single_bubble;

namespace {

Field nodal(const std::shared_ptr<const Mesh>& mesh, auto&& f) {
  Eigen::VectorXd v(mesh->size());
  for (std::size_t n = 0; n < mesh->size(); ++n) v[n] = f(mesh->nodes[n]);
  return Field(mesh, std::move(v));
}

Field random_interior(const std::shared_ptr<const Mesh>& mesh, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(mesh->size());
  for (std::size_t n = 0; n < mesh->size(); ++n)
    if (!mesh->is_boundary(n)) v[n] = g(rng);
  return Field(mesh, std::move(v), BoundaryTag::DirichletZero);
}

}  // namespace

TEST_SUITE("operators") {

TEST_CASE("discrete Laplacian of quadratic and harmonic data") {
  const auto mesh = disk_mesh(0.02);
  const DirichletSolver space(mesh);
  const Field q = discrete_laplacian(space, nodal(mesh, [](const Vec2& p) { return p.squaredNorm(); }));
  const Field z3 = discrete_laplacian(space, nodal(mesh, [](const Vec2& p) {
    return p.x() * p.x() * p.x() - 3 * p.x() * p.y() * p.y();
  }));
  double err_q = 0, err_h = 0, area = 0;
  for (std::size_t n = 0; n < mesh->size(); ++n) {
    if (mesh->is_boundary(n)) {
      REQUIRE(q.values[n] == 0.0);
      continue;
    }
    err_q += mesh->weights[n] * std::abs(q.values[n] - 4.0);
    err_h += mesh->weights[n] * std::abs(z3.values[n]);
    area += mesh->weights[n];
  }
  CHECK(err_q / area < 0.05);
  CHECK(err_h / area < 0.05);
}

TEST_CASE("Dirichlet solve") {
  const auto mesh = disk_mesh(0.04);
  const DirichletSolver space(mesh);
  const Field zero = solve_dirichlet(space, Field(mesh, Eigen::VectorXd::Zero(mesh->size())));
  CHECK(zero.values.cwiseAbs().maxCoeff() == 0.0);
  // g = 1 - |x|² vanishes on the circle and Δg = -4.
  double errs[2];
  const double hs[2] = {0.04, 0.02};
  for (int k = 0; k < 2; ++k) {
    const auto m = disk_mesh(hs[k]);
    const DirichletSolver sp(m);
    const Field f = solve_dirichlet(sp, Field(m, Eigen::VectorXd::Constant(m->size(), -4.0)));
    const Field g = nodal(m, [](const Vec2& p) { return 1.0 - p.squaredNorm(); });
    errs[k] = (f.values - g.values).cwiseAbs().maxCoeff();
  }
  CHECK(errs[1] < 5e-3);
  CHECK(errs[0] / errs[1] > 3.0);
}

TEST_CASE("weight and nonlinear remainder") {
  const auto mesh = disk_mesh(0.05);
  BlowupConfig cfg = single_bubble();
  ScaleParams s;
  s.rho = 1e-2;
  std::mt19937_64 rng(9);
  const Field U = random_interior(mesh, rng, 2.0);
  const Field W = weight_W(U, cfg, s);
  CHECK(W.values.minCoeff() > 0.0);
  cfg.V2 = Expression::constant(0.0);
  const Field W1 = weight_W(U, cfg, s);
  for (std::size_t n = 0; n < mesh->size(); ++n) REQUIRE(W1.values[n] == doctest::Approx(1e-2 * std::exp(U.values[n])));

  cfg = single_bubble();
  const Field zero(mesh, Eigen::VectorXd::Zero(mesh->size()), BoundaryTag::DirichletZero);
  CHECK(nonlinear_N(zero, U, cfg, s).values.cwiseAbs().maxCoeff() == 0.0);
  const Field phi0 = random_interior(mesh, rng, 1.0);
  double ratios[3];
  int k = 0;
  for (double t : {1e-2, 1e-3, 1e-4}) {
    const Field tp(mesh, t * phi0.values, BoundaryTag::DirichletZero);
    ratios[k++] = norm_p(nonlinear_N(tp, U, cfg, s), 1.0) / (t * t);
  }
  CHECK(ratios[2] == doctest::Approx(ratios[1]).epsilon(0.02));
  CHECK(ratios[1] == doctest::Approx(ratios[0]).epsilon(0.05));
  const Field big(mesh, Eigen::VectorXd::Constant(mesh->size(), 51.0));
  try {
    nonlinear_N(big, U, cfg, s);
    FAIL("expected OverflowGuard");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OverflowGuard);
  }
}

TEST_CASE("Lipschitz constant of the remainder shrinks with rho") {
  const auto gp = GreenProvider::analytic_disk();
  std::vector<double> K;
  for (double rho : {1e-2, 1e-3, 1e-4}) {
    const ProblemInstance inst = build_instance(single_bubble(), rho, gp, MeshPolicy{});
    std::mt19937_64 rng(4);
    // Pairs drawn on the sphere where the contraction acts, radius ρ^{1/2α}|log ρ| up to a constant.
    const double radius = 1e-2 * std::pow(rho, 1.0 / 6.0) * std::abs(std::log(rho));
    const auto draw = [&] {
      Field f = random_interior(inst.mesh, rng, 1.0);
      f.values *= radius / norm_H01(*inst.space, f);
      return f;
    };
    double worst = 0.0;
    for (int t = 0; t < 5; ++t) {
      const Field a = draw(), b = draw();
      const Field da(inst.mesh, nonlinear_N(a, inst.U, inst.cfg, inst.scales).values -
                                    nonlinear_N(b, inst.U, inst.cfg, inst.scales).values);
      const Field d(inst.mesh, a.values - b.values, BoundaryTag::DirichletZero);
      worst = std::max(worst, norm_p(da, 1.01) / norm_H01(*inst.space, d));
    }
    K.push_back(worst);
  }
  CHECK(K[1] < K[0]);
  CHECK(K[2] < K[1]);
}

TEST_CASE("L with zero weight reduces to the Dirichlet solve") {
  const auto mesh = disk_mesh(0.04);
  const auto space = std::make_shared<const DirichletSolver>(mesh);
  const LinearOperator L(space, Field(mesh, Eigen::VectorXd::Zero(mesh->size())));
  std::mt19937_64 rng(1);
  const Field h = random_interior(mesh, rng, 1.0);
  double res = 1.0;
  const Field a = solve_L(L, h, &res);
  const Field b = solve_dirichlet(*space, h);
  CHECK(res < 1e-10);
  CHECK((a.values - b.values).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((L.apply(a).values - h.values).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(L.smallest_eigenvalue() == doctest::Approx(5.783).epsilon(0.01));  // first Dirichlet eigenvalue j₀₁²
}

TEST_CASE("resonant weight is reported") {
  const auto mesh = disk_mesh(0.05);
  const auto space = std::make_shared<const DirichletSolver>(mesh);
  const double lambda = LinearOperator(space, Field(mesh, Eigen::VectorXd::Zero(mesh->size()))).smallest_eigenvalue();
  try {
    LinearOperator(space, Field(mesh, Eigen::VectorXd::Constant(mesh->size(), lambda)));
    FAIL("expected NearSingular");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NearSingular);
  }
}

TEST_CASE("norms") {
  const auto mesh = disk_mesh(0.03);
  const Field one(mesh, Eigen::VectorXd::Ones(mesh->size()));
  const double area = mesh->total_weight();
  CHECK(norm_p(one, 1.0) == doctest::Approx(area));
  CHECK(norm_p(one, 1.3) == doctest::Approx(std::pow(area, 1 / 1.3)));
  CHECK(norm_p(one, std::numeric_limits<double>::infinity()) == 1.0);
  CHECK(norm_sup(Field(mesh, -2.0 * Eigen::VectorXd::Ones(mesh->size()))) == 2.0);
  try {
    norm_p(one, 0.5);
    FAIL("expected InvalidExponent");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidExponent);
  }
  // ‖1 - |x|²‖²_{H₀¹} = ∫|∇|² = ∫ 4r² = 2π
  const DirichletSolver space(mesh);
  const Field g = nodal(mesh, [](const Vec2& p) { return 1.0 - p.squaredNorm(); });
  CHECK(norm_H01(space, g) == doctest::Approx(std::sqrt(2 * std::numbers::pi)).epsilon(5e-3));
}

TEST_CASE("kernel coefficient of the rescaled kernel is one") {
  const auto gp = GreenProvider::analytic_disk();
  const ProblemInstance inst = build_instance(single_bubble(), 1e-3, gp, MeshPolicy{});
  const double delta = inst.scales.delta[0];
  Eigen::VectorXd v(inst.mesh->size());
  for (std::size_t n = 0; n < inst.mesh->size(); ++n) v[n] = kernel_Y(0, 3.0, inst.mesh->offset(n, 0) / delta);
  const KernelProjection k = kernel_coefficient(Field(inst.mesh, v), 0, 3.0, delta, inst.eta);
  CHECK(k.a == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(k.denominator > 0.0);
  const Field R = residual_R(inst.U, inst.cfg, inst.scales);
  // R is finite everywhere and nearly zero far from the point.
  CHECK(std::isfinite(R.values.cwiseAbs().maxCoeff()));
}

}
