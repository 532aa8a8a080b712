#pragma once

#include <memory>
#include <string>

#include "blowup/geometry.hpp"

namespace blowup {

/// Scalar function of (x, y) parsed from text such as "1 + 0.5*x^2" or
/// "exp(-y)". Supports + - * / ^, parentheses, the constants pi and e, and
/// exp, log, sqrt, sin, cos, tan, sinh, cosh, tanh, abs.
class Expression {
 public:
  Expression() = default;
  static Expression parse(const std::string& text);
  static Expression constant(double value);

  double operator()(const Vec2& p) const;
  const std::string& text() const { return text_; }

  struct Node;

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace blowup
