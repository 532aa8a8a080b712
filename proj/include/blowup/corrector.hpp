#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "blowup/bubbles.hpp"
#include "blowup/coeffs.hpp"
#include "blowup/fem.hpp"
#include "blowup/geometry.hpp"
#include "blowup/greens.hpp"
#include "blowup/operators.hpp"

namespace blowup {

struct SolverOptions {
  double tol = 1e-10;
  int maxiter = 50;
  double guard = 50.0;
  /// Also run Newton from the fixed-point solution's starting guess and
  /// record the agreement.
  bool newton_check = true;
  std::vector<double> p_values{1.01, 1.1, 1.3};
  Vec2 far_point{0.5, 0.0};
};

/// Everything derived from (cfg, ρ) before the correction: scales,
/// coefficients, mesh, projections, U, R and the linear operator.
struct ProblemInstance {
  BlowupConfig cfg;
  ScaleParams scales;
  CoefficientSet coeffs;
  double eta = 0.0;
  std::shared_ptr<const Mesh> mesh;
  std::shared_ptr<const DirichletSolver> space;
  std::vector<Field> projections;
  Field U;
  Field R;
  Field W;
  std::shared_ptr<const LinearOperator> L;
};

ProblemInstance build_instance(const BlowupConfig& cfg, double rho, const GreenProvider& gp,
                               const MeshPolicy& policy);

enum class SolveStatus { Converged, Diverged, NearSingular, Failed };
std::string_view to_string(SolveStatus s);

struct IterationRecord {
  int k = 0;
  double update = 0.0;  // ‖φ_k - φ_{k-1}‖_{H₀¹}
  double phi_sup = 0.0;
  double phi_h01 = 0.0;
  double factor = 0.0;  // update ratio, 0 for the first step
};

struct SolveReport {
  std::string method;
  double rho = 0.0;
  SolveStatus status = SolveStatus::Failed;
  std::string message;
  int iterations = 0;
  std::vector<IterationRecord> history;
  double contraction_factor = 0.0;
  double phi_sup = 0.0;
  double phi_h01 = 0.0;
  double pde_residual_l1 = 0.0;
  double data_scale_l1 = 0.0;
  double pde_residual_relative = 0.0;
  double lambda_min = 0.0;
  std::vector<double> p_values;
  std::vector<double> R_norms;  // ‖R‖_p per p value
  std::vector<double> peaks;    // max_{A_i} u for positive i, min_{A_i} u for negative i
  double far_value = 0.0;
  double far_target = 0.0;
  std::vector<double> kernel_a;
  std::optional<double> newton_agreement;  // sup |φ_fp - φ_newton|
  bool outside_regime = false;
  std::vector<double> sigma_p;  // sweep-level fitted slopes, empty if insufficient data

  void write_record(std::ostream& os) const;
  void write_history_csv(std::ostream& os) const;
};

struct Correction {
  Field phi;
  SolveReport report;
};

Correction fixed_point_correct(const ProblemInstance& inst, const SolverOptions& opt,
                               const Field* initial = nullptr);
Correction newton_correct(const ProblemInstance& inst, const SolverOptions& opt, const Field* initial = nullptr);

/// Discrete PDE residual Δ_h(U + φ) + f(U + φ) with ΔU taken exactly,
/// zero on boundary nodes.
Field pde_residual(const ProblemInstance& inst, const Field& phi);

struct Solution {
  ProblemInstance instance;
  Field phi;
  Field u;
  SolveReport report;
};

/// Scales, coefficients, projections, U, correction and diagnostics for one ρ.
/// `warm` (possibly on another mesh) seeds the iteration by interpolation.
Solution construct_solution(const BlowupConfig& cfg, double rho, const GreenProvider& gp, const MeshPolicy& policy,
                            const SolverOptions& opt, const Solution* warm = nullptr);

struct SweepResult {
  std::vector<SolveReport> reports;
  std::vector<Solution> solutions;  // kept for converged entries, same order as reports
  std::vector<double> sigma_p;      // empty when fewer than three converged entries
  bool insufficient_data = false;
};

SweepResult continuation_sweep(const BlowupConfig& cfg, const std::vector<double>& rhos, const GreenProvider& gp,
                               const MeshPolicy& policy, const SolverOptions& opt, bool keep_solutions = false);

/// Least-squares slope and intercept of y against x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace blowup
