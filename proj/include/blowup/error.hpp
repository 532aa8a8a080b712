#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace blowup {

enum class ErrorKind {
  // geometry
  InvalidDomain,
  DuplicateCenters,
  OverlappingHoles,
  HoleTouchesBoundary,
  IndexOutOfRange,
  UnresolvableHole,
  StitchFailure,
  // greens
  CoincidentPoints,
  PointOutsideDomain,
  // coeffs
  NonpositivePotentialAtCenter,
  SingularSystem,
  // bubbles
  UndefinedAngleAtOrigin,
  RegimeViolation,
  MeshMismatch,
  // operators
  SolverFailure,
  OverflowGuard,
  NearSingular,
  InvalidExponent,
  // corrector / verify
  Diverged,
  InsufficientSamples,
  QuadratureNonConvergence,
  // cli
  SchemaError,
  ConstraintViolation,
  ParseError,
  NonpositiveSampled,
};

std::string_view to_string(ErrorKind kind);

/// Every failure in the library is reported through this exception; `kind()`
/// lets callers branch without parsing the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace blowup
