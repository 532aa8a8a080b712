#pragma once

#include <iosfwd>
#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "blowup/geometry.hpp"

namespace blowup {

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class BoundaryTag { DirichletZero, Free };

/// Nodal values on a mesh.
struct Field {
  std::shared_ptr<const Mesh> mesh;
  Eigen::VectorXd values;
  BoundaryTag tag = BoundaryTag::Free;

  Field() = default;
  Field(std::shared_ptr<const Mesh> m, Eigen::VectorXd v, BoundaryTag t = BoundaryTag::Free)
      : mesh(std::move(m)), values(std::move(v)), tag(t) {}

  std::size_t size() const { return static_cast<std::size_t>(values.size()); }
  /// CSV with header node,x,y,value.
  void write_csv(std::ostream& os) const;
};

/// P1 stiffness matrix, K_ij = ∫ ∇φ_i·∇φ_j. Cells inside a hole patch are
/// assembled in the patch frame.
SparseMatrix stiffness_matrix(const Mesh& mesh);

/// Factorization of the interior block of the stiffness matrix.
class DirichletSolver {
 public:
  explicit DirichletSolver(std::shared_ptr<const Mesh> mesh);

  const Mesh& mesh() const { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
  const SparseMatrix& stiffness() const { return K_; }
  /// Interior numbering of each node, -1 on the boundary.
  const std::vector<int>& interior_index() const { return index_; }
  std::size_t interior_count() const { return interior_.size(); }
  const std::vector<int>& interior_nodes() const { return interior_; }

  /// Discrete harmonic function matching `values` on boundary nodes.
  Eigen::VectorXd harmonic_extension(const Eigen::VectorXd& values) const;
  /// f with Δ_h f = rhs at interior nodes (lumped) and f = 0 on the boundary.
  Eigen::VectorXd solve_poisson(const Eigen::VectorXd& rhs) const;
  /// Δ_h f = -(K f)_n / m_n at interior nodes, 0 on the boundary.
  Eigen::VectorXd laplacian(const Eigen::VectorXd& f) const;

  SparseMatrix interior_block() const { return KII_; }

 private:
  std::shared_ptr<const Mesh> mesh_;
  SparseMatrix K_;
  SparseMatrix KII_;
  SparseMatrix KIB_;
  std::vector<int> index_;
  std::vector<int> interior_;
  std::vector<int> boundary_;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt_;
};

}  // namespace blowup
