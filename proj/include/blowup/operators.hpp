#pragma once

#include <memory>

#include <Eigen/SparseLU>

#include "blowup/bubbles.hpp"
#include "blowup/coeffs.hpp"
#include "blowup/fem.hpp"

namespace blowup {

/// Δ_h f at interior nodes, 0 on the boundary.
Field discrete_laplacian(const DirichletSolver& space, const Field& f);
/// f with Δ_h f = rhs and f = 0 on ∂Ω_ε.
Field solve_dirichlet(const DirichletSolver& space, const Field& rhs);

/// ΔU from the bubbles directly: -Σ_{k<m1} s_k + (1/τ)Σ_{k≥m1} s_k with
/// s_k = |x-ξ_k|^{α_k-2}e^{w_k}.
Field laplacian_U_exact(const std::shared_ptr<const Mesh>& mesh, const BlowupConfig& cfg, const ScaleParams& scales);

/// ρ(V₁e^u - V₂e^{-τu}) pointwise.
Field nonlinearity_f(const Field& u, const BlowupConfig& cfg, const ScaleParams& scales);

enum class LaplacianPath { Exact, Discrete };
/// R = ΔU + ρ(V₁e^U - V₂e^{-τU}). The exact path is defined at every node;
/// the discrete path only at interior nodes.
Field residual_R(const Field& U, const BlowupConfig& cfg, const ScaleParams& scales,
                 LaplacianPath path = LaplacianPath::Exact, const DirichletSolver* space = nullptr);

/// W = ρV₁e^U + ρτV₂e^{-τU}.
Field weight_W(const Field& U, const BlowupConfig& cfg, const ScaleParams& scales);

/// N(φ) = ρV₁e^U(e^φ-φ-1) - ρV₂e^{-τU}(e^{-τφ}+τφ-1).
Field nonlinear_N(const Field& phi, const Field& U, const BlowupConfig& cfg, const ScaleParams& scales);

/// L = Δ_h + W with Dirichlet elimination, factored once.
class LinearOperator {
 public:
  LinearOperator(std::shared_ptr<const DirichletSolver> space, Field W, bool check_resonance = true);

  const DirichletSolver& space() const { return *space_; }
  const Field& weight() const { return W_; }
  /// Node-indexed matrix: mass-scaled rows of Δ_h + W on interior nodes,
  /// identity rows on boundary nodes.
  SparseMatrix matrix() const;
  Field apply(const Field& phi) const;
  /// Smallest |λ| of (Δ_h + W)v = λv, by inverse iteration.
  double smallest_eigenvalue() const { return lambda_min_; }

  Field solve(const Field& h, double* residual = nullptr) const;

 private:
  std::shared_ptr<const DirichletSolver> space_;
  Field W_;
  SparseMatrix A_;  // interior block of -K + M·W
  Eigen::SparseLU<SparseMatrix> lu_;
  double lambda_min_ = 0.0;
};

inline constexpr double kNearSingularThreshold = 1e-8;

Field solve_L(const LinearOperator& op, const Field& h, double* residual = nullptr);

double norm_p(const Field& f, double p);
double norm_sup(const Field& f);
double norm_H01(const DirichletSolver& space, const Field& f);

/// Weighted norms of y ↦ f(ξ + δy) over the rescaled annulus of `hole`.
double norm_L_alpha(const Field& f, std::size_t hole, double alpha, double delta, double eta);
double norm_H_alpha(const Field& f, std::size_t hole, double alpha, double delta, double eta);

}  // namespace blowup

namespace blowup {

/// Projection of y ↦ f(ξ + δy) onto Y₀ in the weighted L_α inner product,
/// both integrals taken with the same nodal quadrature over the rescaled
/// annulus of `hole`.
struct KernelProjection {
  double a = 0.0;
  double numerator = 0.0;
  double denominator = 0.0;  // ‖Y₀‖²_{L_α} over the annulus
};
KernelProjection kernel_coefficient(const Field& f, std::size_t hole, double alpha, double delta, double eta);

}  // namespace blowup
