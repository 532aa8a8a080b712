#pragma once

#include <memory>
#include <vector>

#include "blowup/geometry.hpp"

namespace blowup {

enum class GreenBackend { AnalyticDisk, Numeric };

struct GreenProfile {
  std::vector<double> t;
  std::vector<double> value;
};

/// Green function of -Δ with Dirichlet data, G = -(1/2π)log|x-y| + H.
/// Immutable once built; the numeric backend memoizes H(·,y) per source
/// point behind a mutex, so evaluation is safe from several threads.
class GreenProvider {
 public:
  static GreenProvider analytic_disk();
  /// Harmonic extension of (1/2π)log|·-y| on a mesh of spacing h.
  static GreenProvider numeric(DomainSpec domain, double h);
  /// Analytic for the unit disk, numeric otherwise.
  static GreenProvider for_domain(const DomainSpec& domain, double h);

  const DomainSpec& domain() const { return domain_; }
  GreenBackend backend() const { return backend_; }

  double green(const Vec2& x, const Vec2& y) const;
  double robin_H(const Vec2& x, const Vec2& y) const;
  /// G(y + t·ray, y) on `count` log-spaced t in [t_min·L, L], L the distance
  /// from y to the boundary along the ray.
  GreenProfile green_gradient_profile(const Vec2& y, const Vec2& ray, double t_min = 1e-3,
                                      std::size_t count = 64) const;

 private:
  struct NumericState;
  GreenProvider(DomainSpec domain, GreenBackend backend, std::shared_ptr<NumericState> state);
  void require_inside(const Vec2& p, const char* what) const;

  DomainSpec domain_;
  GreenBackend backend_;
  std::shared_ptr<NumericState> state_;
};

}  // namespace blowup
