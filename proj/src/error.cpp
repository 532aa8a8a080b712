#include "blowup/error.hpp"

namespace blowup {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidDomain: return "InvalidDomain";
    case ErrorKind::DuplicateCenters: return "DuplicateCenters";
    case ErrorKind::OverlappingHoles: return "OverlappingHoles";
    case ErrorKind::HoleTouchesBoundary: return "HoleTouchesBoundary";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::UnresolvableHole: return "UnresolvableHole";
    case ErrorKind::StitchFailure: return "StitchFailure";
    case ErrorKind::CoincidentPoints: return "CoincidentPoints";
    case ErrorKind::PointOutsideDomain: return "PointOutsideDomain";
    case ErrorKind::NonpositivePotentialAtCenter: return "NonpositivePotentialAtCenter";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::UndefinedAngleAtOrigin: return "UndefinedAngleAtOrigin";
    case ErrorKind::RegimeViolation: return "RegimeViolation";
    case ErrorKind::MeshMismatch: return "MeshMismatch";
    case ErrorKind::SolverFailure: return "SolverFailure";
    case ErrorKind::OverflowGuard: return "OverflowGuard";
    case ErrorKind::NearSingular: return "NearSingular";
    case ErrorKind::InvalidExponent: return "InvalidExponent";
    case ErrorKind::Diverged: return "Diverged";
    case ErrorKind::InsufficientSamples: return "InsufficientSamples";
    case ErrorKind::QuadratureNonConvergence: return "QuadratureNonConvergence";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::ConstraintViolation: return "ConstraintViolation";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::NonpositiveSampled: return "NonpositiveSampled";
  }
  return "Unknown";
}

}  // namespace blowup
