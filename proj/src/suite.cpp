#include "blowup/suite.hpp"

#include <algorithm>
#include <cmath>

#include "blowup/error.hpp"

namespace blowup {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

CheckRow row(std::string id, double rho, double p, double measured, double threshold, bool pass, std::string tag) {
  return CheckRow{std::move(id), rho, p, measured, threshold, pass, std::move(tag)};
}

std::string idx(const std::string& base, std::size_t i) { return base + "_" + std::to_string(i + 1); }

std::vector<double> magnitudes(std::vector<double> v) {
  for (double& x : v) x = std::abs(x);
  return v;
}

}  // namespace

CheckReport select(const CheckReport& r, const std::string& prefix) {
  CheckReport out;
  for (const auto& c : r.rows)
    if (c.check_id.rfind(prefix, 0) == 0) out.add(c);
  return out;
}

CheckReport green_checks(int pairs, std::uint64_t seed, double h, double radius) {
  const std::string tag = "Green function of the disk";
  const GreenFidelity g = check_green_fidelity(pairs, seed, h, radius);
  CheckReport r;
  r.add(row("green.max_error", kNaN, kNaN, g.error_coarse, 1e-3, g.error_coarse <= 1e-3, tag));
  r.add(row("green.max_error_fine", kNaN, kNaN, g.error_fine, 1e-3, g.error_fine <= 1e-3, tag));
  r.add(row("green.ratio_min", kNaN, kNaN, g.ratio, 3.5, g.ratio >= 3.5, tag));
  r.add(row("green.ratio_max", kNaN, kNaN, g.ratio, 4.5, g.ratio <= 4.5, tag));
  r.add(row("green.symmetry", kNaN, kNaN, g.symmetry, 1e-3, g.symmetry <= 1e-3, tag));
  return r;
}

CheckReport kernel_checks(const std::vector<double>& alphas, double tol, double spacing) {
  CheckReport r;
  const std::string itag = "kernel integral identities";
  for (const auto& id : check_integral_identities(alphas, tol)) {
    r.add(row("kernel.integral_sq", kNaN, id.alpha, id.rel_error_squared, 1e-8, id.rel_error_squared <= 1e-8, itag));
    r.add(row("kernel.integral_log", kNaN, id.alpha, id.rel_error_log, 1e-8, id.rel_error_log <= 1e-8, itag));
  }
  for (const auto& k : check_kernel_annihilation(alphas, spacing))
    r.add(row("kernel.annihilation_Y" + std::to_string(k.k), kNaN, k.alpha, k.relative_residual, 1e-4,
              k.relative_residual <= 1e-4, "linearized Liouville kernel"));
  return r;
}

CheckReport constraint_checks(const BlowupConfig& cfg, const std::vector<double>& rhos, const GreenProvider& gp) {
  const std::string tag = "coefficient constraint";
  const ConstraintStudy c = check_constraint(cfg, rhos, gp);
  CheckReport r;
  for (std::size_t k = 0; k < c.rho.size(); ++k) {
    const bool last = k + 1 == c.rho.size();
    r.add(row("coeff.constraint", c.rho[k], kNaN, c.deviation[k], last ? 1e-2 : kNaN,
              last ? c.deviation[k] <= 1e-2 : std::isfinite(c.deviation[k]), tag));
  }
  // The combination holds to rounding at every ρ; a flat sequence below the
  // floor counts as monotone.
  const bool mono = non_increasing_above(c.deviation, 1e-13);
  r.add(row("coeff.constraint_monotone", kNaN, kNaN, mono ? 1.0 : 0.0, 1.0, mono, tag));
  return r;
}

CheckReport expansion_checks(const BlowupConfig& cfg, const std::vector<double>& rhos, const GreenProvider& gp,
                             const MeshPolicy& policy) {
  CheckReport r;
  for (std::size_t i = 0; i < cfg.count(); ++i) {
    const ScalingStudy s = check_projection_expansion(cfg, i, rhos, gp, policy);
    for (std::size_t k = 0; k < s.rho.size(); ++k)
      r.add(row(idx("projection.expansion_error", i), s.rho[k], kNaN, s.values[k], kNaN, std::isfinite(s.values[k]),
                "projection expansion"));
    r.add(row(idx("projection.expansion_slope", i), kNaN, kNaN, s.fit.slope, 0.0, s.fit.slope > 0.0,
              "projection expansion"));
  }
  return r;
}

CheckReport residual_checks(const BlowupConfig& cfg, const std::vector<double>& rhos, const std::vector<double>& ps,
                            const GreenProvider& gp, const MeshPolicy& policy) {
  double inv = std::numeric_limits<double>::infinity();
  for (double a : cfg.alphas) inv = std::min(inv, 1.0 / a);
  const double threshold = 0.5 * inv;
  CheckReport r;
  const auto studies = check_residual_scaling(cfg, rhos, ps, gp, policy);
  for (std::size_t j = 0; j < ps.size(); ++j) {
    for (std::size_t k = 0; k < rhos.size(); ++k)
      r.add(row("residual.norm", rhos[k], ps[j], studies[j].values[k], kNaN, std::isfinite(studies[j].values[k]),
                "residual of the ansatz"));
    r.add(row("residual.slope", kNaN, ps[j], studies[j].fit.slope, threshold, studies[j].fit.slope >= threshold,
              "residual of the ansatz"));
  }
  return r;
}

CheckReport operator_checks(const BlowupConfig& cfg, const std::vector<double>& rhos, int trials, std::uint64_t seed,
                            double p, const GreenProvider& gp, const MeshPolicy& policy) {
  const std::string tag = "linear operator bound";
  const OperatorBoundStudy s = check_operator_bound(cfg, rhos, trials, seed, p, gp, policy);
  CheckReport r;
  for (std::size_t k = 0; k < s.rho.size(); ++k) {
    r.add(row("operator.ratio", s.rho[k], p, s.ratio[k], kNaN, std::isfinite(s.ratio[k]) && s.ratio[k] > 0, tag));
    r.add(row("operator.kernel_amplification", s.rho[k], p, s.kernel_amplification[k], kNaN,
              std::isfinite(s.kernel_amplification[k]), tag));
  }
  r.add(row("operator.spread", kNaN, p, s.spread, 10.0, s.spread <= 10.0, tag));
  return r;
}

CheckReport solution_checks(const BlowupConfig& cfg, const SweepResult& sweep, const std::vector<double>& rhos,
                            const GreenProvider& gp, const SolverOptions& opt) {
  const std::string stag = "contraction and solution";
  CheckReport r;
  const std::size_t m = cfg.count();
  std::vector<double> phi_sup, far_err;
  std::vector<std::vector<double>> peaks(m), a(m);
  bool far_applies = true;
  std::size_t si = 0;
  for (std::size_t k = 0; k < sweep.reports.size(); ++k) {
    const SolveReport& rep = sweep.reports[k];
    const double rho = rhos[k];
    const bool ok = rep.status == SolveStatus::Converged;
    r.add(row("solution.converged", rho, kNaN, rep.iterations, opt.maxiter, ok && rep.iterations <= opt.maxiter, stag));
    if (!ok) continue;
    const Solution& s = sweep.solutions.at(si++);
    r.add(row("solution.contraction", rho, kNaN, rep.contraction_factor, 1.0, rep.contraction_factor < 1.0, stag));
    r.add(row("solution.pde_residual", rho, kNaN, rep.pde_residual_relative, 1e-6, rep.pde_residual_relative <= 1e-6,
              stag));
    if (opt.newton_check) {
      const double agree = rep.newton_agreement.value_or(std::numeric_limits<double>::infinity());
      r.add(row("solution.newton_agreement", rho, kNaN, agree, 1e-8, agree <= 1e-8, stag));
    }
    r.add(row("solution.phi_sup", rho, kNaN, rep.phi_sup, kNaN, std::isfinite(rep.phi_sup), stag));
    phi_sup.push_back(rep.phi_sup);

    for (std::size_t i = 0; i < m; ++i)
      if ((opt.far_point - cfg.points[i]).norm() <= s.instance.eta) far_applies = false;
    if (far_applies && cfg.domain.contains(opt.far_point)) {
      const FarFieldReport f = check_farfield_profile(s, gp, opt.far_point);
      far_err.push_back(f.point_error);
    }
    const auto margins = sign_margins(s);
    for (std::size_t i = 0; i < m; ++i) {
      peaks[i].push_back(rep.peaks[i]);
      a[i].push_back(rep.kernel_a[i]);
      r.add(row(idx("peak.value", i), rho, kNaN, rep.peaks[i], kNaN, std::isfinite(rep.peaks[i]), "peak growth"));
      r.add(row(idx("kernel.a", i), rho, kNaN, rep.kernel_a[i], kNaN, std::isfinite(rep.kernel_a[i]),
                "kernel coefficient"));
      r.add(row(idx("sign.margin", i), rho, kNaN, margins[i], 0.0, margins[i] > 0.0, "sign structure"));
    }
  }
  const bool complete = phi_sup.size() == sweep.reports.size() && !phi_sup.empty();
  const auto trend = [&](const std::string& id, bool pass, const std::string& tag) {
    r.add(row(id, kNaN, kNaN, pass ? 1.0 : 0.0, 1.0, complete && pass, tag));
  };
  trend("solution.phi_sup_trend", strictly_decreasing(phi_sup), stag);
  if (far_applies && !far_err.empty()) {
    for (std::size_t k = 0; k < far_err.size(); ++k) {
      const bool last = k + 1 == far_err.size();
      r.add(row("farfield.error", rhos[k], kNaN, far_err[k], last ? 0.2 : kNaN,
                last ? far_err[k] <= 0.2 : std::isfinite(far_err[k]), "far-field profile"));
    }
    trend("farfield.trend", strictly_decreasing(far_err), "far-field profile");
  }
  for (std::size_t i = 0; i < m; ++i) {
    trend(idx("peak.trend", i), strictly_increasing(magnitudes(peaks[i])), "peak growth");
    trend(idx("kernel.a_trend", i), strictly_decreasing(magnitudes(a[i])), "kernel coefficient");
  }
  return r;
}

CheckReport verify_suite(const RunConfig& rc, const GreenProvider& gp, SweepResult* sweep_out) {
  CheckReport r;
  const BlowupConfig& cfg = rc.problem;
  r.append(kernel_checks(rc.verify.identity_alphas, rc.verify.quadrature_tol, rc.verify.kernel_spacing));
  r.append(constraint_checks(cfg, rc.verify.constraint_rhos, gp));
  r.append(expansion_checks(cfg, rc.rhos, gp, rc.mesh));
  r.append(residual_checks(cfg, rc.rhos, rc.ps, gp, rc.mesh));
  r.append(operator_checks(cfg, rc.rhos, rc.verify.trials, rc.seed, rc.ps.front(), gp, rc.mesh));
  SweepResult sweep = continuation_sweep(cfg, rc.rhos, gp, rc.mesh, rc.solver, true);
  r.append(solution_checks(cfg, sweep, rc.rhos, gp, rc.solver));
  if (sweep_out) *sweep_out = std::move(sweep);
  return r;
}

}  // namespace blowup
