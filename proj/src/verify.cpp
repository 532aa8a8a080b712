#include "blowup/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "blowup/error.hpp"

namespace blowup {
namespace {

constexpr double kPi = std::numbers::pi;

double far_target(const BlowupConfig& cfg, const GreenProvider& gp, const Vec2& x) {
  double t = 0.0;
  for (std::size_t i = 0; i < cfg.count(); ++i) {
    const double g = 2.0 * kPi * (cfg.alphas[i] + 2.0) * gp.green(x, cfg.points[i]);
    t += cfg.positive(i) ? g : -g / cfg.tau;
  }
  return t;
}

bool far_node(const Mesh& mesh, std::size_t n, double eta) {
  for (std::size_t k = 0; k < mesh.centers.size(); ++k)
    if (mesh.offset(n, k).norm() <= eta) return false;
  return true;
}

}  // namespace

void CheckReport::append(const CheckReport& other) { rows.insert(rows.end(), other.rows.begin(), other.rows.end()); }

bool CheckReport::all_pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.pass; });
}

void CheckReport::write_csv(std::ostream& os) const {
  os.precision(12);
  os << "check_id,rho,p,measured,threshold,pass\n";
  for (const auto& r : rows) {
    os << r.check_id << ',';
    if (!std::isnan(r.rho)) os << r.rho;
    os << ',';
    if (!std::isnan(r.p)) os << r.p;
    os << ',' << r.measured << ',';
    if (!std::isnan(r.threshold)) os << r.threshold;
    os << ',' << (r.pass ? "true" : "false") << '\n';
  }
}

ScalingStudy fit_scaling(std::vector<double> rho, std::vector<double> values) {
  ScalingStudy s{std::move(rho), std::move(values), {}};
  if (s.rho.size() < 3) throw Error(ErrorKind::InsufficientSamples, "a slope needs at least three samples");
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < s.rho.size(); ++k) {
    lx.push_back(std::log(s.rho[k]));
    ly.push_back(std::log(s.values[k]));
  }
  s.fit = fit_line(lx, ly);
  return s;
}

ScalingStudy check_projection_expansion(const BlowupConfig& cfg, std::size_t i, const std::vector<double>& rhos,
                                     const GreenProvider& gp, const MeshPolicy& policy) {
  std::vector<double> errs;
  for (double rho : rhos) {
    const ScaleParams scales = choose_scales(cfg, rho, gp);
    const CoefficientSet coeffs = compute_coefficients(cfg, scales, gp);
    PierceSpec pierce{cfg.points, std::vector<double>(scales.eps.data(), scales.eps.data() + cfg.count())};
    const PiercedDomain pd = build_pierced_domain(cfg.domain, pierce);
    const auto mesh = std::make_shared<const Mesh>(build_mesh(pd, policy));
    const DirichletSolver space(mesh);
    const Field p = project_numeric(i, cfg, scales, coeffs, gp, space);
    double err = 0.0;
    for (std::size_t n = 0; n < mesh->size(); ++n) {
      if (!far_node(*mesh, n, pd.eta())) continue;
      const Vec2& x = mesh->nodes[n];
      if (mesh->tags[n] == NodeTag::Outer) {
        err = std::max(err, std::abs(p.values[n]));  // both sides vanish on ∂Ω
        continue;
      }
      err = std::max(err, std::abs(p.values[n] - project_asymptotic(i, cfg, scales, coeffs, gp, x, Regime::Far, pd.eta())));
    }
    errs.push_back(err);
  }
  return fit_scaling(rhos, errs);
}

std::vector<ScalingStudy> check_residual_scaling(const BlowupConfig& cfg, const std::vector<double>& rhos,
                                                 const std::vector<double>& ps, const GreenProvider& gp,
                                                 const MeshPolicy& policy) {
  if (rhos.size() < 3) throw Error(ErrorKind::InsufficientSamples, "residual scaling needs at least three rho values");
  std::vector<std::vector<double>> norms(ps.size());
  for (double rho : rhos) {
    const ScaleParams scales = choose_scales(cfg, rho, gp);
    const CoefficientSet coeffs = compute_coefficients(cfg, scales, gp);
    PierceSpec pierce{cfg.points, std::vector<double>(scales.eps.data(), scales.eps.data() + cfg.count())};
    const auto mesh = std::make_shared<const Mesh>(build_mesh(build_pierced_domain(cfg.domain, pierce), policy));
    const DirichletSolver space(mesh);
    std::vector<Field> proj;
    for (std::size_t k = 0; k < cfg.count(); ++k) proj.push_back(project_numeric(k, cfg, scales, coeffs, gp, space));
    const Field R = residual_R(assemble_U(proj, cfg), cfg, scales);
    for (std::size_t k = 0; k < ps.size(); ++k) norms[k].push_back(norm_p(R, ps[k]));
  }
  std::vector<ScalingStudy> out;
  for (auto& v : norms) out.push_back(fit_scaling(rhos, v));
  return out;
}

OperatorBoundStudy check_operator_bound(const BlowupConfig& cfg, const std::vector<double>& rhos, int trials,
                                        std::uint64_t seed, double p, const GreenProvider& gp,
                                        const MeshPolicy& policy) {
  if (trials < 1) throw Error(ErrorKind::InsufficientSamples, "at least one trial is required");
  OperatorBoundStudy out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (double rho : rhos) {
    const ProblemInstance inst = build_instance(cfg, rho, gp, policy);
    const Mesh& mesh = *inst.mesh;
    double best = 0.0;
    for (int t = 0; t < trials; ++t) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(mesh.size());
      for (std::size_t n = 0; n < mesh.size(); ++n)
        if (!mesh.is_boundary(n)) v[n] = noise(rng);
      Field h(inst.mesh, v, BoundaryTag::DirichletZero);
      h.values /= norm_H01(*inst.space, h);
      const Field phi = inst.L->solve(h);
      best = std::max(best, norm_H01(*inst.space, phi) / norm_p(h, p));
    }
    Eigen::VectorXd k = Eigen::VectorXd::Zero(mesh.size());
    for (std::size_t n = 0; n < mesh.size(); ++n) {
      if (mesh.is_boundary(n)) continue;
      for (std::size_t i = 0; i < cfg.count(); ++i) {
        const double r = mesh.offset(n, i).norm();
        if (r > inst.eta) continue;
        const double ya = std::pow(r / inst.scales.delta[i], cfg.alphas[i]);
        k[n] += (1.0 - ya) / (1.0 + ya) * inst.W.values[n];
      }
    }
    const Field hk(inst.mesh, k, BoundaryTag::DirichletZero);
    const Field phik = inst.L->solve(hk);
    out.rho.push_back(rho);
    out.amplification.push_back(best);
    out.ratio.push_back(best / std::abs(std::log(rho)));
    out.kernel_amplification.push_back(norm_H01(*inst.space, phik) / norm_p(hk, p));
  }
  const auto [lo, hi] = std::minmax_element(out.ratio.begin(), out.ratio.end());
  out.spread = *hi / *lo;
  return out;
}

std::vector<double> check_kernel_coefficients(const Solution& s) {
  std::vector<double> a;
  const auto& inst = s.instance;
  for (std::size_t i = 0; i < inst.cfg.count(); ++i)
    a.push_back(kernel_coefficient(s.phi, i, inst.cfg.alphas[i], inst.scales.delta[i], inst.eta).a);
  return a;
}

FarFieldReport check_farfield_profile(const Solution& s, const GreenProvider& gp, const Vec2& x) {
  const auto& inst = s.instance;
  FarFieldReport r;
  r.target = far_target(inst.cfg, gp, x);
  r.point_value = PointLocator(inst.mesh).interpolate(s.u.values, x);
  r.point_error = std::abs(r.point_value - r.target);
  for (std::size_t n = 0; n < inst.mesh->size(); ++n) {
    if (!far_node(*inst.mesh, n, inst.eta)) continue;
    const double target = inst.mesh->tags[n] == NodeTag::Outer ? 0.0 : far_target(inst.cfg, gp, inst.mesh->nodes[n]);
    r.max_error = std::max(r.max_error, std::abs(s.u.values[n] - target));
  }
  return r;
}

std::vector<IntegralIdentity> check_integral_identities(const std::vector<double>& alphas, double tol) {
  using boost::math::quadrature::gauss_kronrod;
  std::vector<IntegralIdentity> out;
  for (double a : alphas) {
    // Radial reductions: ∫_{ℝ²} f(|y|) dy = 2π ∫_0^∞ f(r) r dr.
    const auto omega = [a](double r) {
      const double ra = std::pow(r, a);
      return 2.0 * a * a * std::pow(r, a - 2.0) / ((1.0 + ra) * (1.0 + ra));
    };
    const auto y0 = [a](double r) {
      const double ra = std::pow(r, a);
      return (1.0 - ra) / (1.0 + ra);
    };
    const auto sq = [&](double r) { return 2.0 * kPi * r * omega(r) * y0(r) * y0(r); };
    const auto lg = [&](double r) { return r > 0.0 ? 2.0 * kPi * r * omega(r) * y0(r) * std::log(r) : 0.0; };
    const auto integrate = [tol](auto f) {
      double e1 = 0.0, e2 = 0.0;
      const double lo = gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 20, tol, &e1);
      const double hi = gauss_kronrod<double, 61>::integrate(f, 1.0, std::numeric_limits<double>::infinity(), 20, tol, &e2);
      const double v = lo + hi;
      if (!(e1 + e2 <= 1e2 * tol * std::max(1.0, std::abs(v))))
        throw Error(ErrorKind::QuadratureNonConvergence, "radial quadrature error estimate too large");
      return v;
    };
    IntegralIdentity id;
    id.alpha = a;
    id.y0_squared = integrate(sq);
    id.y0_log = integrate(lg);
    id.rel_error_squared = std::abs(id.y0_squared - 4.0 * kPi * a / 3.0) / (4.0 * kPi * a / 3.0);
    id.rel_error_log = std::abs(id.y0_log + 4.0 * kPi) / (4.0 * kPi);
    out.push_back(id);
  }
  return out;
}

std::vector<KernelAnnihilation> check_kernel_annihilation(const std::vector<double>& alphas, double spacing) {
  const double r0 = 0.5, r1 = 2.0, t0 = -kPi / 2.0, t1 = kPi / 2.0;
  const int nr = static_cast<int>(std::round((r1 - r0) / spacing));
  const int nt = static_cast<int>(std::round((t1 - t0) / spacing));
  const double dr = (r1 - r0) / nr, dt = (t1 - t0) / nt;
  std::vector<KernelAnnihilation> out;
  std::vector<double> grid(static_cast<std::size_t>(nr + 1) * (nt + 1));
  for (double a : alphas) {
    for (int k = 0; k <= 2; ++k) {
      for (int i = 0; i <= nr; ++i) {
        const double r = r0 + i * dr;
        for (int j = 0; j <= nt; ++j) {
          const double t = t0 + j * dt;
          grid[static_cast<std::size_t>(i) * (nt + 1) + j] = kernel_Y(k, a, Vec2(r * std::cos(t), r * std::sin(t)));
        }
      }
      const auto at = [&](int i, int j) { return grid[static_cast<std::size_t>(i) * (nt + 1) + j]; };
      double worst = 0.0, scale = 0.0;
      for (int i = 1; i < nr; ++i) {
        const double r = r0 + i * dr;
        const double ra = std::pow(r, a);
        const double w = 2.0 * a * a * std::pow(r, a - 2.0) / ((1.0 + ra) * (1.0 + ra));
        for (int j = 1; j < nt; ++j) {
          const double c = at(i, j);
          const double lap = (at(i + 1, j) - 2.0 * c + at(i - 1, j)) / (dr * dr) +
                             (at(i + 1, j) - at(i - 1, j)) / (2.0 * dr * r) +
                             (at(i, j + 1) - 2.0 * c + at(i, j - 1)) / (dt * dt * r * r);
          worst = std::max(worst, std::abs(lap + w * c));
          scale = std::max(scale, std::abs(w * c));
        }
      }
      out.push_back({k, a, worst / scale});
    }
  }
  return out;
}

ConstraintStudy check_constraint(const BlowupConfig& cfg, const std::vector<double>& rhos, const GreenProvider& gp) {
  ConstraintStudy out;
  for (double rho : rhos) {
    const ScaleParams s = choose_scales(cfg, rho, gp);
    const Eigen::VectorXd dev = constraint_deviation(cfg, solve_beta(cfg, s, gp));
    double worst = 0.0;
    for (std::size_t i = 0; i < cfg.count(); ++i)
      worst = std::max(worst, std::abs(dev[i]) / (2.0 * kPi * (cfg.alphas[i] - 2.0)));
    out.rho.push_back(rho);
    out.deviation.push_back(worst);
  }
  return out;
}

GreenFidelity check_green_fidelity(int pairs, std::uint64_t seed, double h, double radius) {
  const GreenProvider exact = GreenProvider::analytic_disk();
  const GreenProvider coarse = GreenProvider::numeric(DomainSpec::unit_disk(), h);
  const GreenProvider fine = GreenProvider::numeric(DomainSpec::unit_disk(), h / 2.0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto draw = [&] {
    const double r = radius * std::sqrt(u(rng)), t = 2.0 * kPi * u(rng);
    return Vec2(r * std::cos(t), r * std::sin(t));
  };
  GreenFidelity g;
  for (int k = 0; k < pairs; ++k) {
    const Vec2 x = draw(), y = draw();
    const double e = exact.green(x, y);
    g.error_coarse = std::max(g.error_coarse, std::abs(coarse.green(x, y) - e));
    g.error_fine = std::max(g.error_fine, std::abs(fine.green(x, y) - e));
    g.symmetry = std::max(g.symmetry, std::abs(coarse.green(x, y) - coarse.green(y, x)));
  }
  g.ratio = g.error_coarse / g.error_fine;
  return g;
}

std::vector<double> sign_margins(const Solution& s) {
  const auto& inst = s.instance;
  std::vector<double> out;
  for (std::size_t i = 0; i < inst.cfg.count(); ++i) {
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < inst.mesh->size(); ++n) {
      const double r = inst.mesh->offset(n, i).norm();
      if (inst.mesh->is_boundary(n) || r > 2.0 * inst.scales.delta[i]) continue;
      margin = std::min(margin, inst.cfg.positive(i) ? s.u.values[n] : -s.u.values[n]);
    }
    out.push_back(margin);
  }
  return out;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t k = 1; k < v.size(); ++k)
    if (!(v[k] < v[k - 1])) return false;
  return true;
}

bool strictly_increasing(const std::vector<double>& v) {
  for (std::size_t k = 1; k < v.size(); ++k)
    if (!(v[k] > v[k - 1])) return false;
  return true;
}

bool non_increasing_above(const std::vector<double>& v, double floor) {
  for (std::size_t k = 1; k < v.size(); ++k)
    if (v[k] > v[k - 1] && v[k] > floor) return false;
  return true;
}

}  // namespace blowup
