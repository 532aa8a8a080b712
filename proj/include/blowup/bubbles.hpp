#pragma once

#include <vector>

#include "blowup/coeffs.hpp"
#include "blowup/fem.hpp"
#include "blowup/greens.hpp"

namespace blowup {

enum class BubbleSign { Positive, Negative };

/// w(x) = log(2α²δ^α / (δ^α + |x-ξ|^α)²).
struct Bubble {
  Vec2 center;
  double alpha = 3.0;
  double delta = 1.0;
  BubbleSign sign = BubbleSign::Positive;

  double value_r(double r) const;
  /// |x-ξ|^{α-2} e^{w} = -Δw, as a function of r = |x-ξ|.
  double source_r(double r) const;
};

double bubble_value(const Bubble& b, const Vec2& x);
std::vector<Bubble> make_bubbles(const BlowupConfig& cfg, const ScaleParams& scales);

/// Y₀ = (1-|y|^α)/(1+|y|^α), Y₁,Y₂ = |y|^{α/2}(cos, sin)(αθ/2)/(1+|y|^α) with θ in (-π, π].
double kernel_Y(int k, double alpha, const Vec2& y);

/// η₀, η, Z₀ and Z = η + γ*·η₀ for one bubble, as functions of r = |x-ξ_j|.
struct TestFunctionSet {
  Vec2 center;
  double alpha = 3.0;
  double delta = 1.0;
  double gamma_star = 0.0;

  double eta0(double r) const;
  double eta(double r) const;
  double Z0(double r) const;
  double Z(double r) const;
};

/// j is 0-based.
TestFunctionSet test_eta(std::size_t j, const BlowupConfig& cfg, const ScaleParams& scales,
                         const CoefficientSet& coeffs);

/// P_ε w = w + h with h discrete harmonic and h = -w on every boundary node.
/// `hole` names the patch whose local frame is used for the offset.
Field project_numeric(const Bubble& b, std::size_t hole, const DirichletSolver& space);

/// Same projection with the harmonic part split as h = ℓ + h_r, where
/// ℓ(x) = -log(2α_i²δ_i^α_i) + 4πα_i H(x,ξ_i) - Σ_k β_ik G(x,ξ_k) is exactly
/// harmonic in Ω_ε and h_r is discrete harmonic with the (small) data
/// -w_i - ℓ. Bubble i is 0-based and its patch is hole i.
Field project_numeric(std::size_t i, const BlowupConfig& cfg, const ScaleParams& scales,
                      const CoefficientSet& coeffs, const GreenProvider& gp, const DirichletSolver& space);

/// Nodal values of ℓ above.
Eigen::VectorXd harmonic_lift(std::size_t i, const BlowupConfig& cfg, const ScaleParams& scales,
                              const CoefficientSet& coeffs, const GreenProvider& gp, const Mesh& mesh);

enum class Regime { Near, Far };

/// Explicit terms of the expansion of P_ε w_i (i 0-based):
/// near: w_i - log(2α_i²δ_i^α_i) + 4πα_i H(x,ξ_i) - Σ_k β_ik G(x,ξ_k);
/// far:  4πα_i G(x,ξ_i) - Σ_k β_ik G(x,ξ_k), requiring |x-ξ_k| ≥ η for all k.
double project_asymptotic(std::size_t i, const BlowupConfig& cfg, const ScaleParams& scales,
                          const CoefficientSet& coeffs, const GreenProvider& gp, const Vec2& x, Regime regime,
                          double eta);

/// U = Σ_{k<m1} P w_k - (1/τ) Σ_{k≥m1} P w_k.
Field assemble_U(const std::vector<Field>& projections, const BlowupConfig& cfg);

}  // namespace blowup
