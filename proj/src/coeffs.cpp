#include "blowup/coeffs.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include <Eigen/LU>

#include "blowup/error.hpp"

namespace blowup {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInvTwoPi = 0.5 / std::numbers::pi;

struct GreenTable {
  Eigen::MatrixXd G;  // G(ξ_i, ξ_j) off the diagonal
  Eigen::VectorXd H;  // H(ξ_i, ξ_i)
};

GreenTable tabulate(const BlowupConfig& cfg, const GreenProvider& gp) {
  const std::size_t m = cfg.count();
  GreenTable t{Eigen::MatrixXd::Zero(m, m), Eigen::VectorXd::Zero(m)};
  for (std::size_t i = 0; i < m; ++i) {
    t.H[i] = gp.robin_H(cfg.points[i], cfg.points[i]);
    for (std::size_t j = 0; j < m; ++j)
      if (i != j) t.G(i, j) = gp.green(cfg.points[i], cfg.points[j]);
  }
  // The numeric backend is only symmetric to mesh accuracy.
  t.G = 0.5 * (t.G + t.G.transpose()).eval();
  return t;
}

Eigen::MatrixXd beta_matrix(const ScaleParams& s, const GreenTable& t) {
  const Eigen::Index m = t.H.size();
  Eigen::MatrixXd A(m, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index k = 0; k < m; ++k) A(j, k) = j == k ? kInvTwoPi * std::log(s.eps[j]) - t.H[j] : -t.G(j, k);
  return A;
}

Eigen::MatrixXd gamma_matrix(const ScaleParams& s, const GreenTable& t) {
  return -beta_matrix(s, t);
}

double relative_residual(const Eigen::MatrixXd& A, const Eigen::MatrixXd& X, const Eigen::MatrixXd& B) {
  const double scale = std::max(B.cwiseAbs().maxCoeff(), (A.cwiseAbs() * X.cwiseAbs()).maxCoeff());
  if (scale == 0.0) return 0.0;
  return (A * X - B).cwiseAbs().maxCoeff() / scale;
}

Eigen::MatrixXd dense_solve(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const char* what) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-14)) {
    std::ostringstream os;
    os << what << " system is singular (condition estimate " << (rcond > 0 ? 1.0 / rcond : INFINITY) << ")";
    throw Error(ErrorKind::SingularSystem, os.str());
  }
  return lu.solve(B);
}

bool row_dominant(const Eigen::MatrixXd& A) {
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    const double off = A.row(i).cwiseAbs().sum() - std::abs(A(i, i));
    if (!(std::abs(A(i, i)) > off)) return false;
  }
  return true;
}

}  // namespace

void BlowupConfig::validate() const {
  std::vector<std::string> problems;
  const std::size_t m = count();
  if (m == 0) problems.push_back("at least one concentration point is required");
  if (alphas.size() != m) problems.push_back("alphas and points differ in length");
  if (m1 > m) problems.push_back("m1 exceeds the number of points");
  if (!(tau > 0.0)) problems.push_back("tau must be positive (τ > 0)");
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const double a = alphas[i];
    const std::string name = "alpha_" + std::to_string(i + 1);
    if (!(a > 2.0)) problems.push_back(name + " = " + std::to_string(a) + " violates α_i > 2");
    else if (std::abs(a / 2.0 - std::round(a / 2.0)) < 1e-9)
      problems.push_back(name + " = " + std::to_string(a) + " violates α_i ∉ 2ℕ");
  }
  for (std::size_t i = 0; i < m; ++i)
    if (!domain.contains(points[i])) problems.push_back("point " + std::to_string(i + 1) + " lies outside the domain");
  if (problems.empty()) return;
  std::string msg;
  for (const auto& p : problems) msg += (msg.empty() ? "" : "; ") + p;
  throw Error(ErrorKind::ConstraintViolation, msg);
}

Eigen::VectorXd compute_rho_i(const BlowupConfig& cfg, const GreenProvider& gp) {
  const GreenTable t = tabulate(cfg, gp);
  const std::size_t m = cfg.count();
  Eigen::VectorXd rho(m);
  for (std::size_t i = 0; i < m; ++i) {
    double pos = 0.0, neg = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      (cfg.positive(j) ? pos : neg) += (cfg.alphas[j] + 2.0) * t.G(i, j);
    }
    rho[i] = (cfg.alphas[i] + 2.0) * t.H[i] + (cfg.positive(i) ? pos - neg / cfg.tau : -cfg.tau * pos + neg);
  }
  return rho;
}

ScaleParams choose_scales(const BlowupConfig& cfg, double rho, const GreenProvider& gp) {
  if (!(rho > 0.0)) throw Error(ErrorKind::ConstraintViolation, "rho must be positive");
  const std::size_t m = cfg.count();
  ScaleParams s;
  s.rho = rho;
  s.rho_i = compute_rho_i(cfg, gp);
  s.d.resize(m);
  s.r.resize(m);
  s.delta.resize(m);
  s.eps.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double a = cfg.alphas[i];
    const double v = cfg.positive(i) ? cfg.V1(cfg.points[i]) : cfg.V2(cfg.points[i]);
    if (!(v > 0.0))
      throw Error(ErrorKind::NonpositivePotentialAtCenter,
                  "potential vanishes or is negative at point " + std::to_string(i + 1));
    // Negative bubbles match ρτV₂e^{-τU}, hence the factor τ.
    const double factor = cfg.positive(i) ? 1.0 : cfg.tau;
    s.d[i] = factor * v * std::exp(2.0 * kPi * s.rho_i[i]) / (2.0 * a * a);
    s.r[i] = s.d[i] * std::exp(-kPi * s.rho_i[i]);
    s.delta[i] = std::pow(s.d[i] * rho, 1.0 / a);
    s.eps[i] = std::pow(s.r[i] * rho, 2.0 / (a - 2.0));
  }
  return s;
}

Eigen::MatrixXd solve_beta(const BlowupConfig& cfg, const ScaleParams& s, const GreenProvider& gp, double* residual) {
  const GreenTable t = tabulate(cfg, gp);
  const std::size_t m = cfg.count();
  const Eigen::MatrixXd A = beta_matrix(s, t);
  // Row i of β satisfies Σ_k A_jk β_ik = b_ij, i.e. A βᵢᵀ = bᵢᵀ.
  Eigen::MatrixXd B(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    const double a = cfg.alphas[i];
    for (std::size_t j = 0; j < m; ++j) {
      const double hij = i == j ? t.H[i] : gp.robin_H(cfg.points[i], cfg.points[j]);
      const double local = i == j ? std::log(s.delta[i]) : std::log((cfg.points[i] - cfg.points[j]).norm());
      B(j, i) = -4.0 * kPi * a * hij + 2.0 * a * local;
    }
  }
  const Eigen::MatrixXd X = dense_solve(A, B, "beta");
  if (residual) *residual = relative_residual(A, X, B);
  return X.transpose();
}

GammaSolution solve_gamma(const BlowupConfig& cfg, const ScaleParams& s, const GreenProvider& gp) {
  const GreenTable t = tabulate(cfg, gp);
  const std::size_t m = cfg.count();
  const Eigen::MatrixXd C = gamma_matrix(s, t);
  const Eigen::MatrixXd rhs_gamma = 2.0 * Eigen::MatrixXd::Identity(m, m);
  Eigen::MatrixXd rhs_tilde(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double a = cfg.alphas[j];
      rhs_tilde(i, j) = i == j ? (4.0 / 3.0) * a * std::log(s.delta[j]) + 8.0 / 3.0 + (8.0 * kPi / 3.0) * a * t.H[j]
                               : (8.0 * kPi / 3.0) * a * t.G(i, j);
    }
  }
  GammaSolution out;
  out.gamma = dense_solve(C, rhs_gamma, "gamma");
  out.gamma_tilde = dense_solve(C, rhs_tilde, "gamma-tilde");
  out.gamma_residual = relative_residual(C, out.gamma, rhs_gamma);
  out.gamma_tilde_residual = relative_residual(C, out.gamma_tilde, rhs_tilde);

  out.gamma_star.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double log_delta = std::log(s.delta[j]);
    const double gt = out.gamma_tilde(j, j), g = out.gamma(j, j);
    double num = gt * kInvTwoPi * log_delta + ((8.0 * kPi / 3.0) * cfg.alphas[j] - gt) * t.H[j];
    double den = 1.0 - g * t.H[j] + g * kInvTwoPi * log_delta;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == j) continue;
      num -= out.gamma_tilde(i, j) * t.G(i, j);
      den -= out.gamma(i, j) * t.G(i, j);
    }
    out.gamma_star[j] = num / den;
  }
  return out;
}

CoefficientSet compute_coefficients(const BlowupConfig& cfg, const ScaleParams& s, const GreenProvider& gp) {
  CoefficientSet c;
  c.beta = solve_beta(cfg, s, gp, &c.beta_residual);
  GammaSolution g = solve_gamma(cfg, s, gp);
  c.gamma = std::move(g.gamma);
  c.gamma_tilde = std::move(g.gamma_tilde);
  c.gamma_star = std::move(g.gamma_star);
  c.gamma_residual = g.gamma_residual;
  c.gamma_tilde_residual = g.gamma_tilde_residual;
  c.diagonally_dominant = systems_dominant(cfg, s, gp);
  return c;
}

Eigen::VectorXd constraint_deviation(const BlowupConfig& cfg, const Eigen::MatrixXd& beta) {
  const std::size_t m = cfg.count();
  Eigen::VectorXd dev(m);
  for (std::size_t i = 0; i < m; ++i) {
    double pos = 0.0, neg = 0.0;
    for (std::size_t j = 0; j < m; ++j) (cfg.positive(j) ? pos : neg) += beta(j, i);
    const double combo = cfg.positive(i) ? pos - neg / cfg.tau : -cfg.tau * pos + neg;
    dev[i] = combo - 2.0 * kPi * (cfg.alphas[i] - 2.0);
  }
  return dev;
}

bool systems_dominant(const BlowupConfig& cfg, const ScaleParams& s, const GreenProvider& gp) {
  const GreenTable t = tabulate(cfg, gp);
  return row_dominant(beta_matrix(s, t)) && row_dominant(gamma_matrix(s, t));
}

std::optional<double> dominance_threshold(const BlowupConfig& cfg, const GreenProvider& gp) {
  std::optional<double> best;
  for (int k = 12; k >= 1; --k) {
    const double rho = std::pow(10.0, -k);
    if (!systems_dominant(cfg, choose_scales(cfg, rho, gp), gp)) break;
    best = rho;
  }
  return best;
}

void CoefficientSet::write_csv(std::ostream& os) const {
  os.precision(17);
  os << "matrix,row,col,value\n";
  const auto dump = [&](const char* name, const Eigen::MatrixXd& M) {
    for (Eigen::Index i = 0; i < M.rows(); ++i)
      for (Eigen::Index j = 0; j < M.cols(); ++j) os << name << ',' << i + 1 << ',' << j + 1 << ',' << M(i, j) << '\n';
  };
  dump("beta", beta);
  dump("gamma", gamma);
  dump("gamma_tilde", gamma_tilde);
  for (Eigen::Index j = 0; j < gamma_star.size(); ++j) os << "gamma_star," << j + 1 << ",1," << gamma_star[j] << '\n';
}

}  // namespace blowup
