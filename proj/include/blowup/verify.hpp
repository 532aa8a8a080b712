#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "blowup/corrector.hpp"

namespace blowup {

/// One machine-readable check outcome.
struct CheckRow {
  std::string check_id;
  double rho = std::numeric_limits<double>::quiet_NaN();
  double p = std::numeric_limits<double>::quiet_NaN();
  double measured = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string tag;  // statement the check measures
};

struct CheckReport {
  std::vector<CheckRow> rows;

  void add(CheckRow row) { rows.push_back(std::move(row)); }
  void append(const CheckReport& other);
  bool all_pass() const;
  /// CSV with header check_id,rho,p,measured,threshold,pass.
  void write_csv(std::ostream& os) const;
};

struct ScalingStudy {
  std::vector<double> rho;
  std::vector<double> values;
  LineFit fit;  // slope of log(values) against log(rho)
};
ScalingStudy fit_scaling(std::vector<double> rho, std::vector<double> values);

/// max |project_numeric - far expansion| over mesh nodes at distance > η from
/// every point, per ρ, for bubble `i`.
ScalingStudy check_projection_expansion(const BlowupConfig& cfg, std::size_t i, const std::vector<double>& rhos,
                                     const GreenProvider& gp, const MeshPolicy& policy);

/// ‖R‖_p against ρ for each p. Needs at least three ρ values.
std::vector<ScalingStudy> check_residual_scaling(const BlowupConfig& cfg, const std::vector<double>& rhos,
                                                 const std::vector<double>& ps, const GreenProvider& gp,
                                                 const MeshPolicy& policy);

struct OperatorBoundStudy {
  std::vector<double> rho;
  std::vector<double> amplification;         // max over random trials of ‖T h‖_{H₀¹}/‖h‖_p
  std::vector<double> ratio;                 // amplification / |log ρ|
  std::vector<double> kernel_amplification;  // same for h shaped like the rescaled Y₀
  double spread = 0.0;                       // max ratio / min ratio
};
OperatorBoundStudy check_operator_bound(const BlowupConfig& cfg, const std::vector<double>& rhos, int trials,
                                        std::uint64_t seed, double p, const GreenProvider& gp,
                                        const MeshPolicy& policy);

std::vector<double> check_kernel_coefficients(const Solution& s);

struct FarFieldReport {
  double point_value = 0.0;
  double target = 0.0;
  double point_error = 0.0;
  double max_error = 0.0;  // over nodes farther than η from every point
};
/// u_ρ against 2πΣ_{i<m1}(α_i+2)G(·,ξ_i) - (2π/τ)Σ_{i≥m1}(α_i+2)G(·,ξ_i).
FarFieldReport check_farfield_profile(const Solution& s, const GreenProvider& gp, const Vec2& x);

struct IntegralIdentity {
  double alpha = 0.0;
  double y0_squared = 0.0;  // ∫ ω Y₀², exact 4πα/3
  double y0_log = 0.0;      // ∫ ω Y₀ log|y|, exact -4π
  double rel_error_squared = 0.0;
  double rel_error_log = 0.0;
};
std::vector<IntegralIdentity> check_integral_identities(const std::vector<double>& alphas, double tol = 1e-12);

struct KernelAnnihilation {
  int k = 0;
  double alpha = 0.0;
  double relative_residual = 0.0;
};
/// Polar finite differences of ΔY_k + 2α²|y|^{α-2}(1+|y|^α)^{-2} Y_k on
/// 0.5 ≤ |y| ≤ 2, |θ| ≤ π/2, with radial and angular spacing `spacing`.
std::vector<KernelAnnihilation> check_kernel_annihilation(const std::vector<double>& alphas, double spacing = 1e-3);

struct ConstraintStudy {
  std::vector<double> rho;
  std::vector<double> deviation;  // max over i of |combination - 2π(α_i-2)| / (2π(α_i-2))
};
ConstraintStudy check_constraint(const BlowupConfig& cfg, const std::vector<double>& rhos, const GreenProvider& gp);

struct GreenFidelity {
  double error_coarse = 0.0;
  double error_fine = 0.0;
  double ratio = 0.0;
  double symmetry = 0.0;  // max |G(x,y) - G(y,x)| of the numeric backend
};
/// Numeric backend at spacing h and h/2 against the analytic disk formula
/// at `pairs` random pairs with |x|, |y| ≤ radius.
GreenFidelity check_green_fidelity(int pairs, std::uint64_t seed, double h, double radius = 0.75);

/// Nodes with ε_i < |x-ξ_i| ≤ 2δ_i: min of u for positive bubbles and
/// -max for negative ones, so that a positive value means correct sign.
std::vector<double> sign_margins(const Solution& s);

/// Sequence helpers used by the trend checks.
bool strictly_decreasing(const std::vector<double>& v);
bool strictly_increasing(const std::vector<double>& v);
/// Non-increasing, ignoring steps where the next value is below `floor`.
bool non_increasing_above(const std::vector<double>& v, double floor);

}  // namespace blowup
