#include "blowup/corrector.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "blowup/error.hpp"

namespace blowup {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Field zero_field(const std::shared_ptr<const Mesh>& mesh) {
  return Field(mesh, Eigen::VectorXd::Zero(mesh->size()), BoundaryTag::DirichletZero);
}

Field add(const Field& a, const Field& b) { return Field(a.mesh, a.values + b.values, a.tag); }

double weighted_l1(const Mesh& mesh, const Eigen::VectorXd& v) {
  double s = 0.0;
  for (std::size_t n = 0; n < mesh.size(); ++n)
    if (!mesh.is_boundary(n)) s += mesh.weights[n] * std::abs(v[n]);
  return s;
}

bool converged_update(double update, double norm, double tol) { return update < tol * std::max(1.0, norm); }

// Updates below this fraction of the iterate are rounding noise; their
// ratios say nothing about contraction.
constexpr double kRoundingFloor = 1e-13;

}  // namespace

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::Diverged: return "diverged";
    case SolveStatus::NearSingular: return "near-singular";
    case SolveStatus::Failed: return "failed";
  }
  return "unknown";
}

ProblemInstance build_instance(const BlowupConfig& cfg, double rho, const GreenProvider& gp,
                               const MeshPolicy& policy) {
  cfg.validate();
  ProblemInstance inst;
  inst.cfg = cfg;
  inst.scales = choose_scales(cfg, rho, gp);
  inst.coeffs = compute_coefficients(cfg, inst.scales, gp);
  PierceSpec pierce{cfg.points, std::vector<double>(inst.scales.eps.data(), inst.scales.eps.data() + cfg.count())};
  const PiercedDomain pd = build_pierced_domain(cfg.domain, pierce);
  inst.eta = pd.eta();
  inst.mesh = std::make_shared<const Mesh>(build_mesh(pd, policy));
  inst.space = std::make_shared<const DirichletSolver>(inst.mesh);
  for (std::size_t k = 0; k < cfg.count(); ++k)
    inst.projections.push_back(project_numeric(k, cfg, inst.scales, inst.coeffs, gp, *inst.space));
  inst.U = assemble_U(inst.projections, cfg);
  inst.R = residual_R(inst.U, cfg, inst.scales);
  inst.W = weight_W(inst.U, cfg, inst.scales);
  inst.L = std::make_shared<const LinearOperator>(inst.space, inst.W);
  return inst;
}

Field pde_residual(const ProblemInstance& inst, const Field& phi) {
  const Field u = add(inst.U, phi);
  Field r = nonlinearity_f(u, inst.cfg, inst.scales);
  r.values += laplacian_U_exact(inst.mesh, inst.cfg, inst.scales).values + inst.space->laplacian(phi.values);
  for (std::size_t n = 0; n < r.size(); ++n)
    if (inst.mesh->is_boundary(n)) r.values[n] = 0.0;
  return r;
}

Correction fixed_point_correct(const ProblemInstance& inst, const SolverOptions& opt, const Field* initial) {
  Correction out{initial ? *initial : zero_field(inst.mesh), {}};
  SolveReport& rep = out.report;
  rep.method = "fixed-point";
  rep.rho = inst.scales.rho;
  rep.lambda_min = inst.L->smallest_eigenvalue();
  Field& phi = out.phi;
  double prev = kNaN;
  int growth = 0;
  try {
    for (int k = 1; k <= opt.maxiter; ++k) {
      Field rhs = nonlinear_N(phi, inst.U, inst.cfg, inst.scales);
      rhs.values = -(inst.R.values + rhs.values);
      Field next = inst.L->solve(rhs);
      const double update = norm_H01(*inst.space, Field(inst.mesh, next.values - phi.values));
      phi = std::move(next);
      IterationRecord rec{k, update, norm_sup(phi), norm_H01(*inst.space, phi), 0.0};
      if (k > 1 && prev > kRoundingFloor * std::max(1.0, rec.phi_h01)) {
        rec.factor = update / prev;
        rep.contraction_factor = std::max(rep.contraction_factor, rec.factor);
      }
      rep.history.push_back(rec);
      rep.iterations = k;
      if (!(rec.phi_sup <= opt.guard)) {
        rep.status = SolveStatus::Diverged;
        rep.message = "sup norm of the correction exceeded the guard";
        return out;
      }
      if (converged_update(update, rec.phi_h01, opt.tol)) {
        rep.status = SolveStatus::Converged;
        break;
      }
      growth = rec.factor >= 1.0 ? growth + 1 : 0;
      if (growth >= 3) {
        rep.status = SolveStatus::Diverged;
        rep.message = "update ratio stayed at or above 1";
        return out;
      }
      prev = update;
    }
  } catch (const Error& e) {
    rep.status = e.kind() == ErrorKind::NearSingular ? SolveStatus::NearSingular : SolveStatus::Diverged;
    rep.message = e.what();
    return out;
  }
  if (rep.status != SolveStatus::Converged) {
    rep.status = SolveStatus::Diverged;
    rep.message = "iteration limit reached";
  }
  rep.phi_sup = norm_sup(phi);
  rep.phi_h01 = norm_H01(*inst.space, phi);
  return out;
}

Correction newton_correct(const ProblemInstance& inst, const SolverOptions& opt, const Field* initial) {
  Correction out{initial ? *initial : zero_field(inst.mesh), {}};
  SolveReport& rep = out.report;
  rep.method = "newton";
  rep.rho = inst.scales.rho;
  rep.lambda_min = inst.L->smallest_eigenvalue();
  Field& phi = out.phi;
  double prev = kNaN;
  try {
    for (int k = 1; k <= opt.maxiter; ++k) {
      Field F = inst.L->apply(phi);
      F.values += inst.R.values + nonlinear_N(phi, inst.U, inst.cfg, inst.scales).values;
      const LinearOperator J(inst.space, weight_W(add(inst.U, phi), inst.cfg, inst.scales), false);
      F.values = -F.values;
      const Field step = J.solve(F);
      phi.values += step.values;
      const double update = norm_H01(*inst.space, step);
      IterationRecord rec{k, update, norm_sup(phi), norm_H01(*inst.space, phi), 0.0};
      if (k > 1 && prev > kRoundingFloor * std::max(1.0, rec.phi_h01)) rec.factor = update / prev;
      rep.history.push_back(rec);
      rep.iterations = k;
      if (!(rec.phi_sup <= opt.guard)) {
        rep.status = SolveStatus::Diverged;
        rep.message = "sup norm of the correction exceeded the guard";
        return out;
      }
      if (converged_update(update, rec.phi_h01, opt.tol)) {
        rep.status = SolveStatus::Converged;
        break;
      }
      prev = update;
    }
  } catch (const Error& e) {
    rep.status = e.kind() == ErrorKind::NearSingular ? SolveStatus::NearSingular : SolveStatus::Diverged;
    rep.message = e.what();
    return out;
  }
  if (rep.status != SolveStatus::Converged) {
    rep.status = SolveStatus::Diverged;
    rep.message = "iteration limit reached";
  }
  rep.phi_sup = norm_sup(phi);
  rep.phi_h01 = norm_H01(*inst.space, phi);
  return out;
}

Solution construct_solution(const BlowupConfig& cfg, double rho, const GreenProvider& gp, const MeshPolicy& policy,
                            const SolverOptions& opt, const Solution* warm) {
  Solution s;
  s.instance = build_instance(cfg, rho, gp, policy);
  const ProblemInstance& inst = s.instance;

  std::optional<Field> seed;
  if (warm) {
    const PointLocator old(warm->phi.mesh);
    Eigen::VectorXd v(inst.mesh->size());
    for (std::size_t n = 0; n < inst.mesh->size(); ++n)
      v[n] = inst.mesh->is_boundary(n) ? 0.0 : old.interpolate(warm->phi.values, inst.mesh->nodes[n]);
    seed = Field(inst.mesh, std::move(v), BoundaryTag::DirichletZero);
  }
  Correction fp = fixed_point_correct(inst, opt, seed ? &*seed : nullptr);
  if (seed && fp.report.status != SolveStatus::Converged) fp = fixed_point_correct(inst, opt);
  s.phi = std::move(fp.phi);
  s.report = std::move(fp.report);
  SolveReport& rep = s.report;
  s.u = add(inst.U, s.phi);
  s.u.tag = BoundaryTag::DirichletZero;

  if (opt.newton_check && rep.status == SolveStatus::Converged) {
    const Correction nt = newton_correct(inst, opt);
    if (nt.report.status == SolveStatus::Converged) rep.newton_agreement = norm_sup(Field(inst.mesh, nt.phi.values - s.phi.values));
  }

  const Field res = pde_residual(inst, s.phi);
  rep.pde_residual_l1 = weighted_l1(*inst.mesh, res.values);
  {
    const auto w = weight_W(s.u, cfg, inst.scales);
    // With a = ρV₁e^u, b = ρV₂e^{-τu}: f = a - b and W = a + τb, so a + b = f + 2(W - f)/(τ + 1).
    Eigen::VectorXd scale = nonlinearity_f(s.u, cfg, inst.scales).values;
    scale += 2.0 * (w.values - scale) / (cfg.tau + 1.0);
    rep.data_scale_l1 = weighted_l1(*inst.mesh, scale);
  }
  rep.pde_residual_relative = rep.data_scale_l1 > 0 ? rep.pde_residual_l1 / rep.data_scale_l1 : rep.pde_residual_l1;

  rep.p_values = opt.p_values;
  for (double p : opt.p_values) rep.R_norms.push_back(norm_p(inst.R, p));

  for (std::size_t i = 0; i < cfg.count(); ++i) {
    double peak = cfg.positive(i) ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < inst.mesh->size(); ++n) {
      if (inst.mesh->offset(n, i).norm() > inst.eta) continue;
      peak = cfg.positive(i) ? std::max(peak, s.u.values[n]) : std::min(peak, s.u.values[n]);
    }
    rep.peaks.push_back(peak);
    rep.kernel_a.push_back(kernel_coefficient(s.phi, i, cfg.alphas[i], inst.scales.delta[i], inst.eta).a);
  }

  if (cfg.domain.contains(opt.far_point)) {
    rep.far_value = PointLocator(inst.mesh).interpolate(s.u.values, opt.far_point);
    double target = 0.0;
    for (std::size_t i = 0; i < cfg.count(); ++i) {
      const double g = 2.0 * kPi * (cfg.alphas[i] + 2.0) * gp.green(opt.far_point, cfg.points[i]);
      target += cfg.positive(i) ? g : -g / cfg.tau;
    }
    rep.far_target = target;
  }
  rep.outside_regime = !inst.coeffs.diagonally_dominant;
  return s;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

SweepResult continuation_sweep(const BlowupConfig& cfg, const std::vector<double>& rhos, const GreenProvider& gp,
                               const MeshPolicy& policy, const SolverOptions& opt, bool keep_solutions) {
  SweepResult out;
  std::optional<Solution> last;
  std::vector<double> log_rho;
  std::vector<std::vector<double>> log_norm(opt.p_values.size());
  for (double rho : rhos) {
    try {
      Solution s = construct_solution(cfg, rho, gp, policy, opt, last ? &*last : nullptr);
      out.reports.push_back(s.report);
      if (s.report.status == SolveStatus::Converged) {
        log_rho.push_back(std::log(rho));
        for (std::size_t k = 0; k < opt.p_values.size(); ++k) log_norm[k].push_back(std::log(s.report.R_norms[k]));
        if (keep_solutions) out.solutions.push_back(s);
        last = std::move(s);
      }
    } catch (const Error& e) {
      SolveReport rep;
      rep.method = "fixed-point";
      rep.rho = rho;
      rep.status = e.kind() == ErrorKind::NearSingular ? SolveStatus::NearSingular : SolveStatus::Failed;
      rep.message = e.what();
      out.reports.push_back(rep);
    }
  }
  if (log_rho.size() >= 3) {
    for (const auto& y : log_norm) out.sigma_p.push_back(fit_line(log_rho, y).slope);
  } else {
    out.insufficient_data = true;
  }
  for (auto& r : out.reports) r.sigma_p = out.sigma_p;
  return out;
}

namespace {

std::string key_number(double v) {
  std::ostringstream k;
  k << v;
  return k.str();
}

}  // namespace

void SolveReport::write_record(std::ostream& os) const {
  os.precision(17);
  os << "method=" << method << '\n'
     << "rho=" << rho << '\n'
     << "status=" << to_string(status) << '\n'
     << "message=" << message << '\n'
     << "iterations=" << iterations << '\n'
     << "contraction_factor=" << contraction_factor << '\n'
     << "phi_sup=" << phi_sup << '\n'
     << "phi_h01=" << phi_h01 << '\n'
     << "pde_residual_l1=" << pde_residual_l1 << '\n'
     << "data_scale_l1=" << data_scale_l1 << '\n'
     << "pde_residual_relative=" << pde_residual_relative << '\n'
     << "lambda_min=" << lambda_min << '\n'
     << "far_value=" << far_value << '\n'
     << "far_target=" << far_target << '\n'
     << "outside_regime=" << (outside_regime ? "true" : "false") << '\n';
  for (std::size_t k = 0; k < p_values.size() && k < R_norms.size(); ++k)
    os << "R_norm_p" << key_number(p_values[k]) << '=' << R_norms[k] << '\n';
  for (std::size_t i = 0; i < peaks.size(); ++i) os << "peak_" << i + 1 << '=' << peaks[i] << '\n';
  for (std::size_t i = 0; i < kernel_a.size(); ++i) os << "kernel_a_" << i + 1 << '=' << kernel_a[i] << '\n';
  if (newton_agreement) os << "newton_agreement=" << *newton_agreement << '\n';
  if (sigma_p.empty()) os << "sigma_p=insufficient-data\n";
  for (std::size_t k = 0; k < sigma_p.size() && k < p_values.size(); ++k)
    os << "sigma_p" << key_number(p_values[k]) << '=' << sigma_p[k] << '\n';
}

void SolveReport::write_history_csv(std::ostream& os) const {
  os.precision(17);
  os << "iteration,update_h01,phi_sup,phi_h01,factor\n";
  for (const auto& r : history) os << r.k << ',' << r.update << ',' << r.phi_sup << ',' << r.phi_h01 << ',' << r.factor << '\n';
}

}  // namespace blowup
