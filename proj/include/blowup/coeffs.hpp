#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "blowup/expr.hpp"
#include "blowup/geometry.hpp"
#include "blowup/greens.hpp"

namespace blowup {

/// Full problem description. Bubbles 0..m1-1 are positive (driven by V1),
/// the rest negative (driven by V2, which absorbs the constant ν).
struct BlowupConfig {
  DomainSpec domain = DomainSpec::unit_disk();
  std::vector<Vec2> points;
  std::vector<double> alphas;
  std::size_t m1 = 0;
  double tau = 1.0;
  Expression V1 = Expression::constant(1.0);
  Expression V2 = Expression::constant(1.0);

  std::size_t count() const { return points.size(); }
  bool positive(std::size_t i) const { return i < m1; }
  /// Throws ConstraintViolation listing every violated invariant.
  void validate() const;
};

struct ScaleParams {
  double rho = 0.0;
  Eigen::VectorXd rho_i, d, r, delta, eps;
};

struct CoefficientSet {
  Eigen::MatrixXd beta, gamma, gamma_tilde;
  Eigen::VectorXd gamma_star;
  double beta_residual = 0.0;
  double gamma_residual = 0.0;
  double gamma_tilde_residual = 0.0;
  /// false when some system loses row diagonal dominance (outside the
  /// asymptotic regime); the solve still proceeds.
  bool diagonally_dominant = true;

  /// CSV rows (matrix, row, col, value), 1-based indices.
  void write_csv(std::ostream& os) const;
};

Eigen::VectorXd compute_rho_i(const BlowupConfig& cfg, const GreenProvider& gp);
ScaleParams choose_scales(const BlowupConfig& cfg, double rho, const GreenProvider& gp);

/// Rows of β solve the system with matrix A_jj = (1/2π)log ε_j - H(ξ_j,ξ_j),
/// A_jk = -G(ξ_j,ξ_k).
Eigen::MatrixXd solve_beta(const BlowupConfig& cfg, const ScaleParams& scales, const GreenProvider& gp,
                           double* residual = nullptr);

struct GammaSolution {
  Eigen::MatrixXd gamma, gamma_tilde;
  Eigen::VectorXd gamma_star;
  double gamma_residual = 0.0;
  double gamma_tilde_residual = 0.0;
};
GammaSolution solve_gamma(const BlowupConfig& cfg, const ScaleParams& scales, const GreenProvider& gp);

CoefficientSet compute_coefficients(const BlowupConfig& cfg, const ScaleParams& scales, const GreenProvider& gp);

/// Σ_{j≤m1}β_ji - (1/τ)Σ_{j>m1}β_ji (and the mirrored form for negative i)
/// minus 2π(α_i - 2).
Eigen::VectorXd constraint_deviation(const BlowupConfig& cfg, const Eigen::MatrixXd& beta);

/// Row diagonal dominance of the β and γ system matrices at the given scales.
bool systems_dominant(const BlowupConfig& cfg, const ScaleParams& scales, const GreenProvider& gp);
/// Largest ρ on a decade grid from 1e-1 down to 1e-12 below which every
/// grid point is diagonally dominant; empty if none is.
std::optional<double> dominance_threshold(const BlowupConfig& cfg, const GreenProvider& gp);

}  // namespace blowup
