#pragma once

#include <memory>

#include "blowup/coeffs.hpp"
#include "blowup/geometry.hpp"

namespace blowup::test {

inline BlowupConfig single_bubble(double alpha = 3.0) {
  BlowupConfig c;
  c.points = {Vec2(0.0, 0.0)};
  c.alphas = {alpha};
  c.m1 = 1;
  return c;
}

inline BlowupConfig two_bubble(double alpha = 3.5, double tau = 1.0) {
  BlowupConfig c;
  c.points = {Vec2(-0.4, 0.0), Vec2(0.4, 0.0)};
  c.alphas = {alpha, alpha};
  c.m1 = 1;
  c.tau = tau;
  return c;
}

inline std::shared_ptr<const Mesh> disk_mesh(double h) {
  return std::make_shared<const Mesh>(build_domain_mesh(DomainSpec::unit_disk(), h));
}

}  // namespace blowup::test
