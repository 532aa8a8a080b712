#include "blowup/greens.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>

#include "blowup/error.hpp"
#include "blowup/fem.hpp"

namespace blowup {

namespace {
constexpr double kInvTwoPi = 0.5 / std::numbers::pi;
constexpr double kBoundarySlack = 1e-12;
}  // namespace

struct GreenProvider::NumericState {
  std::shared_ptr<const Mesh> mesh;
  std::unique_ptr<DirichletSolver> solver;
  std::unique_ptr<PointLocator> locator;
  mutable std::mutex mutex;
  mutable std::map<std::pair<double, double>, std::shared_ptr<const Eigen::VectorXd>> cache;

  std::shared_ptr<const Eigen::VectorXd> regular_part(const Vec2& y) const {
    const std::pair<double, double> key{y.x(), y.y()};
    {
      std::lock_guard lock(mutex);
      if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    Eigen::VectorXd data = Eigen::VectorXd::Zero(mesh->size());
    for (std::size_t n = 0; n < mesh->size(); ++n)
      if (mesh->is_boundary(n)) data[n] = kInvTwoPi * std::log((mesh->nodes[n] - y).norm());
    auto h = std::make_shared<const Eigen::VectorXd>(solver->harmonic_extension(data));
    std::lock_guard lock(mutex);
    return cache.emplace(key, std::move(h)).first->second;
  }
};

GreenProvider::GreenProvider(DomainSpec domain, GreenBackend backend, std::shared_ptr<NumericState> state)
    : domain_(std::move(domain)), backend_(backend), state_(std::move(state)) {}

GreenProvider GreenProvider::analytic_disk() {
  return GreenProvider(DomainSpec::unit_disk(), GreenBackend::AnalyticDisk, nullptr);
}

GreenProvider GreenProvider::numeric(DomainSpec domain, double h) {
  auto state = std::make_shared<NumericState>();
  state->mesh = std::make_shared<const Mesh>(build_domain_mesh(domain, h));
  state->solver = std::make_unique<DirichletSolver>(state->mesh);
  state->locator = std::make_unique<PointLocator>(state->mesh);
  return GreenProvider(std::move(domain), GreenBackend::Numeric, std::move(state));
}

GreenProvider GreenProvider::for_domain(const DomainSpec& domain, double h) {
  if (domain.kind() == DomainKind::UnitDisk) return analytic_disk();
  return numeric(domain, h);
}

void GreenProvider::require_inside(const Vec2& p, const char* what) const {
  if (!domain_.contains(p) && domain_.distance_to_boundary(p) > kBoundarySlack)
    throw Error(ErrorKind::PointOutsideDomain, std::string(what) + " lies outside the domain");
}

double GreenProvider::robin_H(const Vec2& x, const Vec2& y) const {
  require_inside(x, "x");
  require_inside(y, "y");
  if (backend_ == GreenBackend::AnalyticDisk) {
    const std::complex<double> zx(x.x(), x.y()), zy(y.x(), y.y());
    return kInvTwoPi * std::log(std::abs(1.0 - zx * std::conj(zy)));
  }
  return state_->locator->interpolate(*state_->regular_part(y), x);
}

double GreenProvider::green(const Vec2& x, const Vec2& y) const {
  if (x == y) throw Error(ErrorKind::CoincidentPoints, "G(x,x) is singular");
  return -kInvTwoPi * std::log((x - y).norm()) + robin_H(x, y);
}

GreenProfile GreenProvider::green_gradient_profile(const Vec2& y, const Vec2& ray, double t_min,
                                                   std::size_t count) const {
  require_inside(y, "y");
  const Vec2 dir = ray.normalized();
  const double reach = domain_.distance_along_ray(y, dir);
  GreenProfile out;
  const double lo = std::log(t_min * reach), hi = std::log(reach);
  for (std::size_t k = 0; k < count; ++k) {
    const double t = count == 1 ? reach : std::exp(lo + (hi - lo) * static_cast<double>(k) / (count - 1));
    out.t.push_back(t);
    out.value.push_back(green(y + t * dir, y));
  }
  return out;
}

}  // namespace blowup
