#include "blowup/fem.hpp"

#include <ostream>

#include "blowup/error.hpp"

namespace blowup {

void Field::write_csv(std::ostream& os) const {
  os.precision(17);
  os << "node,x,y,value\n";
  for (std::size_t n = 0; n < size(); ++n)
    os << n << ',' << mesh->nodes[n].x() << ',' << mesh->nodes[n].y() << ',' << values[n] << '\n';
}

SparseMatrix stiffness_matrix(const Mesh& mesh) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(mesh.cells.size() * 9);
  for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
    const auto v = mesh.cell_coords(c);
    const auto& t = mesh.cells[c];
    std::array<Vec2, 3> e;  // edge opposite vertex k, rotated
    for (int k = 0; k < 3; ++k) e[k] = v[(k + 2) % 3] - v[(k + 1) % 3];
    const double area = 0.5 * (e[2].x() * -e[1].y() - e[2].y() * -e[1].x());
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) trip.emplace_back(t[i], t[j], e[i].dot(e[j]) / (4.0 * area));
  }
  SparseMatrix K(mesh.size(), mesh.size());
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

DirichletSolver::DirichletSolver(std::shared_ptr<const Mesh> mesh) : mesh_(std::move(mesh)) {
  const Mesh& m = *mesh_;
  K_ = stiffness_matrix(m);
  index_.assign(m.size(), -1);
  std::vector<int> bindex(m.size(), -1);
  for (std::size_t n = 0; n < m.size(); ++n) {
    if (m.is_boundary(n)) {
      bindex[n] = static_cast<int>(boundary_.size());
      boundary_.push_back(static_cast<int>(n));
    } else {
      index_[n] = static_cast<int>(interior_.size());
      interior_.push_back(static_cast<int>(n));
    }
  }
  std::vector<Eigen::Triplet<double>> ii, ib;
  for (int col = 0; col < K_.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(K_, col); it; ++it) {
      const int r = index_[it.row()];
      if (r < 0) continue;
      if (index_[col] >= 0) ii.emplace_back(r, index_[col], it.value());
      else ib.emplace_back(r, bindex[col], it.value());
    }
  }
  KII_.resize(interior_.size(), interior_.size());
  KII_.setFromTriplets(ii.begin(), ii.end());
  KIB_.resize(interior_.size(), boundary_.size());
  KIB_.setFromTriplets(ib.begin(), ib.end());
  ldlt_.compute(KII_);
  if (ldlt_.info() != Eigen::Success) throw Error(ErrorKind::SolverFailure, "stiffness factorization failed");
}

Eigen::VectorXd DirichletSolver::harmonic_extension(const Eigen::VectorXd& values) const {
  Eigen::VectorXd g(boundary_.size());
  for (std::size_t k = 0; k < boundary_.size(); ++k) g[k] = values[boundary_[k]];
  const Eigen::VectorXd ui = ldlt_.solve(-(KIB_ * g));
  Eigen::VectorXd out = values;
  for (std::size_t k = 0; k < interior_.size(); ++k) out[interior_[k]] = ui[k];
  return out;
}

Eigen::VectorXd DirichletSolver::solve_poisson(const Eigen::VectorXd& rhs) const {
  Eigen::VectorXd b(interior_.size());
  for (std::size_t k = 0; k < interior_.size(); ++k) b[k] = -mesh_->weights[interior_[k]] * rhs[interior_[k]];
  const Eigen::VectorXd fi = ldlt_.solve(b);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh_->size());
  for (std::size_t k = 0; k < interior_.size(); ++k) out[interior_[k]] = fi[k];
  return out;
}

Eigen::VectorXd DirichletSolver::laplacian(const Eigen::VectorXd& f) const {
  const Eigen::VectorXd kf = K_ * f;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(f.size());
  for (int n : interior_) out[n] = -kf[n] / mesh_->weights[n];
  return out;
}

}  // namespace blowup
