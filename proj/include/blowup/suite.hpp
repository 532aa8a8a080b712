#pragma once

#include "blowup/config.hpp"
#include "blowup/verify.hpp"

namespace blowup {

/// Check groups emitted by the verify and green-check commands. Each row
/// carries its check id and the statement it measures; the acceptance
/// program reads the same rows.

/// green.max_error (coarse spacing), green.ratio, green.symmetry.
CheckReport green_checks(int pairs, std::uint64_t seed, double h, double radius);

/// kernel.integral_sq / kernel.integral_log per α and kernel.annihilation_Y{k} per α.
CheckReport kernel_checks(const std::vector<double>& alphas, double tol, double spacing);

/// coeff.constraint per ρ (final ρ against 10⁻²) and coeff.constraint_monotone.
CheckReport constraint_checks(const BlowupConfig& cfg, const std::vector<double>& rhos, const GreenProvider& gp);

/// projection.expansion_slope per bubble: error of the far expansion must
/// decay with ρ.
CheckReport expansion_checks(const BlowupConfig& cfg, const std::vector<double>& rhos, const GreenProvider& gp,
                             const MeshPolicy& policy);

/// residual.slope per p against half the smallest 1/α_i.
CheckReport residual_checks(const BlowupConfig& cfg, const std::vector<double>& rhos, const std::vector<double>& ps,
                            const GreenProvider& gp, const MeshPolicy& policy);

/// operator.ratio per ρ and operator.spread against 10.
CheckReport operator_checks(const BlowupConfig& cfg, const std::vector<double>& rhos, int trials, std::uint64_t seed,
                            double p, const GreenProvider& gp, const MeshPolicy& policy);

/// Rows derived from a converged continuation sweep with kept solutions:
/// solution.* (convergence, contraction, PDE residual, ‖φ‖∞ trend, Newton
/// agreement), farfield.*, peak.*, kernel.a_* and sign.* rows.
CheckReport solution_checks(const BlowupConfig& cfg, const SweepResult& sweep, const std::vector<double>& rhos,
                            const GreenProvider& gp, const SolverOptions& opt);

/// Every group above for the configured problem.
CheckReport verify_suite(const RunConfig& rc, const GreenProvider& gp, SweepResult* sweep_out = nullptr);

/// Rows whose id starts with `prefix`.
CheckReport select(const CheckReport& r, const std::string& prefix);

}  // namespace blowup
