#include "blowup/operators.hpp"

#include <cmath>
#include <sstream>

#include "blowup/error.hpp"

namespace blowup {
namespace {

void require_same_mesh(const Field& a, const Field& b) {
  if (a.mesh != b.mesh) throw Error(ErrorKind::MeshMismatch, "fields live on different meshes");
}

Eigen::VectorXd sample(const Expression& v, const Mesh& mesh) {
  Eigen::VectorXd out(mesh.size());
  for (std::size_t n = 0; n < mesh.size(); ++n) out[n] = v(mesh.nodes[n]);
  return out;
}

// Positive-group and negative-group coefficients ρV₁ and ρV₂, zero when the
// corresponding group is empty.
std::pair<Eigen::VectorXd, Eigen::VectorXd> scaled_potentials(const Mesh& mesh, const BlowupConfig& cfg, double rho) {
  Eigen::VectorXd a = Eigen::VectorXd::Zero(mesh.size()), b = Eigen::VectorXd::Zero(mesh.size());
  if (cfg.m1 > 0) a = rho * sample(cfg.V1, mesh);
  if (cfg.m1 < cfg.count()) b = rho * sample(cfg.V2, mesh);
  return {a, b};
}

}  // namespace

Field discrete_laplacian(const DirichletSolver& space, const Field& f) {
  return Field(f.mesh, space.laplacian(f.values), BoundaryTag::DirichletZero);
}

Field solve_dirichlet(const DirichletSolver& space, const Field& rhs) {
  return Field(rhs.mesh, space.solve_poisson(rhs.values), BoundaryTag::DirichletZero);
}

Field laplacian_U_exact(const std::shared_ptr<const Mesh>& mesh, const BlowupConfig& cfg, const ScaleParams& scales) {
  const auto bubbles = make_bubbles(cfg, scales);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh->size());
  for (std::size_t k = 0; k < bubbles.size(); ++k) {
    const double c = cfg.positive(k) ? -1.0 : 1.0 / cfg.tau;
    for (std::size_t n = 0; n < mesh->size(); ++n) out[n] += c * bubbles[k].source_r(mesh->offset(n, k).norm());
  }
  return Field(mesh, std::move(out));
}

Field nonlinearity_f(const Field& u, const BlowupConfig& cfg, const ScaleParams& scales) {
  const auto [a, b] = scaled_potentials(*u.mesh, cfg, scales.rho);
  Eigen::VectorXd out(u.size());
  for (std::size_t n = 0; n < u.size(); ++n)
    out[n] = a[n] * std::exp(u.values[n]) - b[n] * std::exp(-cfg.tau * u.values[n]);
  return Field(u.mesh, std::move(out));
}

Field residual_R(const Field& U, const BlowupConfig& cfg, const ScaleParams& scales, LaplacianPath path,
                 const DirichletSolver* space) {
  Field f = nonlinearity_f(U, cfg, scales);
  if (path == LaplacianPath::Exact) {
    f.values += laplacian_U_exact(U.mesh, cfg, scales).values;
    return f;
  }
  if (!space) throw Error(ErrorKind::MeshMismatch, "discrete residual needs the mesh discretization");
  f.values += space->laplacian(U.values);
  for (std::size_t n = 0; n < f.size(); ++n)
    if (U.mesh->is_boundary(n)) f.values[n] = 0.0;
  return f;
}

Field weight_W(const Field& U, const BlowupConfig& cfg, const ScaleParams& scales) {
  const auto [a, b] = scaled_potentials(*U.mesh, cfg, scales.rho);
  Eigen::VectorXd out(U.size());
  for (std::size_t n = 0; n < U.size(); ++n)
    out[n] = a[n] * std::exp(U.values[n]) + cfg.tau * b[n] * std::exp(-cfg.tau * U.values[n]);
  return Field(U.mesh, std::move(out));
}

Field nonlinear_N(const Field& phi, const Field& U, const BlowupConfig& cfg, const ScaleParams& scales) {
  require_same_mesh(phi, U);
  const auto [a, b] = scaled_potentials(*U.mesh, cfg, scales.rho);
  const double tau = cfg.tau;
  Eigen::VectorXd out(U.size());
  for (std::size_t n = 0; n < U.size(); ++n) {
    const double p = phi.values[n];
    if (!(std::abs(p) <= 50.0))
      throw Error(ErrorKind::OverflowGuard, "|phi| exceeds 50 at node " + std::to_string(n));
    out[n] = a[n] * std::exp(U.values[n]) * (std::expm1(p) - p) -
             b[n] * std::exp(-tau * U.values[n]) * (std::expm1(-tau * p) + tau * p);
  }
  return Field(U.mesh, std::move(out));
}

LinearOperator::LinearOperator(std::shared_ptr<const DirichletSolver> space, Field W, bool check_resonance)
    : space_(std::move(space)), W_(std::move(W)) {
  const Mesh& mesh = space_->mesh();
  if (W_.mesh.get() != &mesh) throw Error(ErrorKind::MeshMismatch, "weight lives on a different mesh");
  const auto& interior = space_->interior_nodes();
  A_ = -space_->interior_block();
  for (std::size_t k = 0; k < interior.size(); ++k) {
    const int n = interior[k];
    A_.coeffRef(k, k) += mesh.weights[n] * W_.values[n];
  }
  A_.makeCompressed();
  lu_.compute(A_);
  if (lu_.info() != Eigen::Success) throw Error(ErrorKind::SolverFailure, "factorization of L failed: " + lu_.lastErrorMessage());

  if (!check_resonance) return;
  Eigen::VectorXd m(interior.size());
  for (std::size_t k = 0; k < interior.size(); ++k) m[k] = mesh.weights[interior[k]];
  Eigen::VectorXd v = Eigen::VectorXd::Ones(interior.size());
  v /= std::sqrt(v.dot(m.cwiseProduct(v)));
  double lambda = 0.0;
  for (int it = 0; it < 40; ++it) {
    Eigen::VectorXd y = lu_.solve(m.cwiseProduct(v));
    const double norm = std::sqrt(y.dot(m.cwiseProduct(y)));
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      lambda = 0.0;
      break;
    }
    v = y / norm;
    const double next = v.dot(A_ * v);
    if (it > 5 && std::abs(next - lambda) <= 1e-10 * std::abs(next)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  lambda_min_ = std::abs(lambda);
  if (lambda_min_ < kNearSingularThreshold) {
    std::ostringstream os;
    os << "smallest eigenvalue estimate of L is " << lambda_min_;
    throw Error(ErrorKind::NearSingular, os.str());
  }
}

SparseMatrix LinearOperator::matrix() const {
  const Mesh& mesh = space_->mesh();
  const auto& interior = space_->interior_nodes();
  std::vector<Eigen::Triplet<double>> trip;
  for (int col = 0; col < A_.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(A_, col); it; ++it)
      trip.emplace_back(interior[it.row()], interior[col], it.value());
  for (std::size_t n = 0; n < mesh.size(); ++n)
    if (mesh.is_boundary(n)) trip.emplace_back(static_cast<int>(n), static_cast<int>(n), 1.0);
  SparseMatrix out(mesh.size(), mesh.size());
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

Field LinearOperator::apply(const Field& phi) const {
  Eigen::VectorXd out = space_->laplacian(phi.values);
  const Mesh& mesh = space_->mesh();
  for (std::size_t n = 0; n < mesh.size(); ++n)
    if (!mesh.is_boundary(n)) out[n] += W_.values[n] * phi.values[n];
  return Field(phi.mesh, std::move(out), BoundaryTag::DirichletZero);
}

Field LinearOperator::solve(const Field& h, double* residual) const {
  const Mesh& mesh = space_->mesh();
  if (h.mesh.get() != &mesh) throw Error(ErrorKind::MeshMismatch, "right-hand side lives on a different mesh");
  const auto& interior = space_->interior_nodes();
  Eigen::VectorXd b(interior.size());
  for (std::size_t k = 0; k < interior.size(); ++k) b[k] = mesh.weights[interior[k]] * h.values[interior[k]];
  Eigen::VectorXd x = lu_.solve(b);
  double rel = 0.0;
  const double bnorm = b.norm();
  if (bnorm > 0.0) {
    for (int refine = 0; refine < 3; ++refine) {
      const Eigen::VectorXd r = b - A_ * x;
      rel = r.norm() / bnorm;
      if (rel <= 1e-12) break;
      x += lu_.solve(r);
    }
    rel = (b - A_ * x).norm() / bnorm;
  }
  if (!(rel <= 1e-10)) {
    std::ostringstream os;
    os << "relative residual " << rel << " after refinement";
    throw Error(ErrorKind::SolverFailure, os.str());
  }
  if (residual) *residual = rel;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh.size());
  for (std::size_t k = 0; k < interior.size(); ++k) out[interior[k]] = x[k];
  return Field(h.mesh, std::move(out), BoundaryTag::DirichletZero);
}

Field solve_L(const LinearOperator& op, const Field& h, double* residual) { return op.solve(h, residual); }

double norm_p(const Field& f, double p) {
  if (std::isinf(p) && p > 0) return norm_sup(f);
  if (!(p >= 1.0)) throw Error(ErrorKind::InvalidExponent, "norm exponent must be at least 1");
  double s = 0.0;
  for (std::size_t n = 0; n < f.size(); ++n) s += f.mesh->weights[n] * std::pow(std::abs(f.values[n]), p);
  return std::pow(s, 1.0 / p);
}

double norm_sup(const Field& f) { return f.values.size() ? f.values.cwiseAbs().maxCoeff() : 0.0; }

double norm_H01(const DirichletSolver& space, const Field& f) {
  return std::sqrt(std::max(0.0, f.values.dot(space.stiffness() * f.values)));
}

namespace {
double rescaled_weight(double r, double alpha, double delta) {
  const double y = r / delta;
  const double s = 1.0 + std::pow(y, alpha);
  return std::pow(y, alpha - 2.0) / (s * s);
}
}  // namespace

double norm_L_alpha(const Field& f, std::size_t hole, double alpha, double delta, double eta) {
  const Mesh& mesh = *f.mesh;
  double s = 0.0;
  for (std::size_t n = 0; n < mesh.size(); ++n) {
    const double r = mesh.offset(n, hole).norm();
    if (r > eta) continue;
    s += mesh.weights[n] * rescaled_weight(r, alpha, delta) * f.values[n] * f.values[n];
  }
  return std::sqrt(s / (delta * delta));
}

double norm_H_alpha(const Field& f, std::size_t hole, double alpha, double delta, double eta) {
  const Mesh& mesh = *f.mesh;
  double grad = 0.0;
  for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
    const auto& t = mesh.cells[c];
    bool inside = true;
    for (int k = 0; k < 3; ++k) inside = inside && mesh.offset(t[k], hole).norm() <= eta * (1.0 + 1e-12);
    if (!inside) continue;
    const auto v = mesh.cell_coords(c);
    std::array<Vec2, 3> e;
    for (int k = 0; k < 3; ++k) e[k] = v[(k + 2) % 3] - v[(k + 1) % 3];
    const double area = 0.5 * std::abs(e[2].x() * e[1].y() - e[2].y() * e[1].x());
    Vec2 g = Vec2::Zero();
    for (int k = 0; k < 3; ++k) g += f.values[t[k]] * Vec2(-e[k].y(), e[k].x());
    grad += g.squaredNorm() / (4.0 * area);
  }
  const double l = norm_L_alpha(f, hole, alpha, delta, eta);
  return std::sqrt(grad + l * l);
}

}  // namespace blowup

namespace blowup {

KernelProjection kernel_coefficient(const Field& f, std::size_t hole, double alpha, double delta, double eta) {
  const Mesh& mesh = *f.mesh;
  KernelProjection out;
  for (std::size_t n = 0; n < mesh.size(); ++n) {
    const double r = mesh.offset(n, hole).norm();
    if (r > eta) continue;
    const double ya = std::pow(r / delta, alpha);
    const double y0 = (1.0 - ya) / (1.0 + ya);
    const double w = mesh.weights[n] * rescaled_weight(r, alpha, delta) / (delta * delta);
    out.numerator += w * f.values[n] * y0;
    out.denominator += w * y0 * y0;
  }
  out.a = out.numerator / out.denominator;
  return out;
}

}  // namespace blowup
