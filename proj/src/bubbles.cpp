#include "blowup/bubbles.hpp"

#include <cmath>
#include <numbers>

#include "blowup/error.hpp"

namespace blowup {
namespace {
constexpr double kPi = std::numbers::pi;
}

double Bubble::value_r(double r) const {
  const double da = std::pow(delta, alpha);
  return std::log(2.0 * alpha * alpha) + alpha * std::log(delta) - 2.0 * std::log(da + std::pow(r, alpha));
}

double Bubble::source_r(double r) const {
  const double da = std::pow(delta, alpha);
  const double s = da + std::pow(r, alpha);
  return 2.0 * alpha * alpha * da * std::pow(r, alpha - 2.0) / (s * s);
}

double bubble_value(const Bubble& b, const Vec2& x) { return b.value_r((x - b.center).norm()); }

std::vector<Bubble> make_bubbles(const BlowupConfig& cfg, const ScaleParams& scales) {
  std::vector<Bubble> out;
  for (std::size_t i = 0; i < cfg.count(); ++i)
    out.push_back(Bubble{cfg.points[i], cfg.alphas[i], scales.delta[i],
                         cfg.positive(i) ? BubbleSign::Positive : BubbleSign::Negative});
  return out;
}

double kernel_Y(int k, double alpha, const Vec2& y) {
  const double r = y.norm();
  const double ra = std::pow(r, alpha);
  if (k == 0) return (1.0 - ra) / (1.0 + ra);
  if (k != 1 && k != 2) throw Error(ErrorKind::IndexOutOfRange, "kernel index must be 0, 1 or 2");
  if (r == 0.0) throw Error(ErrorKind::UndefinedAngleAtOrigin, "angle undefined at y = 0");
  double theta = std::atan2(y.y(), y.x());
  if (theta <= -kPi) theta = kPi;
  const double amp = std::pow(r, alpha / 2.0) / (1.0 + ra);
  return amp * (k == 1 ? std::cos(alpha * theta / 2.0) : std::sin(alpha * theta / 2.0));
}

double TestFunctionSet::eta0(double r) const {
  const double da = std::pow(delta, alpha);
  return -2.0 * da / (da + std::pow(r, alpha));
}

double TestFunctionSet::eta(double r) const {
  const double da = std::pow(delta, alpha), ra = std::pow(r, alpha);
  const double s = da + ra;
  return (4.0 / 3.0) * std::log(s) * (da - ra) / s + (8.0 / 3.0) * da / s;
}

double TestFunctionSet::Z0(double r) const {
  const double da = std::pow(delta, alpha), ra = std::pow(r, alpha);
  return (da - ra) / (da + ra);
}

double TestFunctionSet::Z(double r) const { return eta(r) + gamma_star * eta0(r); }

TestFunctionSet test_eta(std::size_t j, const BlowupConfig& cfg, const ScaleParams& scales,
                         const CoefficientSet& coeffs) {
  if (j >= cfg.count()) throw Error(ErrorKind::IndexOutOfRange, "test function index out of range");
  return TestFunctionSet{cfg.points[j], cfg.alphas[j], scales.delta[j], coeffs.gamma_star[j]};
}

Field project_numeric(const Bubble& b, std::size_t hole, const DirichletSolver& space) {
  const Mesh& mesh = space.mesh();
  Eigen::VectorXd w(mesh.size()), data = Eigen::VectorXd::Zero(mesh.size());
  for (std::size_t n = 0; n < mesh.size(); ++n) {
    w[n] = b.value_r(mesh.offset(n, hole).norm());
    if (mesh.is_boundary(n)) data[n] = -w[n];
  }
  Eigen::VectorXd p = w + space.harmonic_extension(data);
  for (std::size_t n = 0; n < mesh.size(); ++n)
    if (mesh.is_boundary(n)) p[n] = 0.0;
  return Field(space.mesh_ptr(), std::move(p), BoundaryTag::DirichletZero);
}

Eigen::VectorXd harmonic_lift(std::size_t i, const BlowupConfig& cfg, const ScaleParams& scales,
                              const CoefficientSet& coeffs, const GreenProvider& gp, const Mesh& mesh) {
  const std::size_t m = cfg.count();
  const double a = cfg.alphas[i];
  const double base = -std::log(2.0 * a * a * std::pow(scales.delta[i], a));
  Eigen::VectorXd out(mesh.size());
  for (std::size_t n = 0; n < mesh.size(); ++n) {
    const Vec2& x = mesh.nodes[n];
    double v = base + 4.0 * kPi * a * gp.robin_H(x, cfg.points[i]);
    for (std::size_t k = 0; k < m; ++k) {
      const double g = -std::log(mesh.offset(n, k).norm()) / (2.0 * kPi) + gp.robin_H(x, cfg.points[k]);
      v -= coeffs.beta(i, k) * g;
    }
    out[n] = v;
  }
  return out;
}

Field project_numeric(std::size_t i, const BlowupConfig& cfg, const ScaleParams& scales,
                      const CoefficientSet& coeffs, const GreenProvider& gp, const DirichletSolver& space) {
  const Mesh& mesh = space.mesh();
  const Bubble b{cfg.points[i], cfg.alphas[i], scales.delta[i], BubbleSign::Positive};
  const Eigen::VectorXd lift = harmonic_lift(i, cfg, scales, coeffs, gp, mesh);
  Eigen::VectorXd w(mesh.size()), data = Eigen::VectorXd::Zero(mesh.size());
  for (std::size_t n = 0; n < mesh.size(); ++n) {
    w[n] = b.value_r(mesh.offset(n, i).norm());
    if (mesh.is_boundary(n)) data[n] = -w[n] - lift[n];
  }
  Eigen::VectorXd p = w + lift + space.harmonic_extension(data);
  for (std::size_t n = 0; n < mesh.size(); ++n)
    if (mesh.is_boundary(n)) p[n] = 0.0;
  return Field(space.mesh_ptr(), std::move(p), BoundaryTag::DirichletZero);
}

double project_asymptotic(std::size_t i, const BlowupConfig& cfg, const ScaleParams& scales,
                          const CoefficientSet& coeffs, const GreenProvider& gp, const Vec2& x, Regime regime,
                          double eta) {
  const std::size_t m = cfg.count();
  if (i >= m) throw Error(ErrorKind::IndexOutOfRange, "bubble index out of range");
  for (std::size_t k = 0; k < m; ++k) {
    const double d = (x - cfg.points[k]).norm();
    if (regime == Regime::Far && d < eta)
      throw Error(ErrorKind::RegimeViolation, "far expansion used within eta of point " + std::to_string(k + 1));
    if (d < scales.eps[k])
      throw Error(ErrorKind::RegimeViolation, "x lies inside hole " + std::to_string(k + 1));
  }
  const double a = cfg.alphas[i];
  double sum = 0.0;
  for (std::size_t k = 0; k < m; ++k) sum += coeffs.beta(i, k) * gp.green(x, cfg.points[k]);
  if (regime == Regime::Far) return 4.0 * kPi * a * gp.green(x, cfg.points[i]) - sum;
  const Bubble b{cfg.points[i], a, scales.delta[i], BubbleSign::Positive};
  return bubble_value(b, x) - std::log(2.0 * a * a * std::pow(scales.delta[i], a)) +
         4.0 * kPi * a * gp.robin_H(x, cfg.points[i]) - sum;
}

Field assemble_U(const std::vector<Field>& projections, const BlowupConfig& cfg) {
  if (projections.size() != cfg.count())
    throw Error(ErrorKind::MeshMismatch, "one projection per bubble is required");
  const auto& mesh = projections.front().mesh;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(mesh->size());
  for (std::size_t k = 0; k < projections.size(); ++k) {
    if (projections[k].mesh != mesh) throw Error(ErrorKind::MeshMismatch, "projections live on different meshes");
    u += (cfg.positive(k) ? 1.0 : -1.0 / cfg.tau) * projections[k].values;
  }
  return Field(mesh, std::move(u), BoundaryTag::DirichletZero);
}

}  // namespace blowup
