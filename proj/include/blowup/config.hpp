#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "blowup/coeffs.hpp"
#include "blowup/corrector.hpp"
#include "blowup/geometry.hpp"

namespace blowup {

enum class Command { Construct, Sweep, Verify, GreenCheck };
std::string_view to_string(Command c);
std::optional<Command> parse_command(std::string_view name);

/// Settings of the verification suite that are not part of the problem.
struct VerifyOptions {
  int trials = 10;           // random right-hand sides per ρ in the operator-bound check
  int green_pairs = 100;     // random pairs in the Green fidelity check
  double green_h = 0.02;     // coarse spacing of the Green fidelity check
  double green_radius = 0.75;
  double kernel_spacing = 1e-3;
  double quadrature_tol = 1e-12;
  std::vector<double> identity_alphas{2.5, 3.0, 3.7};
  std::vector<double> constraint_rhos{1e-2, 1e-3, 1e-4, 1e-5};
};

struct RunConfig {
  BlowupConfig problem;
  std::vector<double> rhos{1e-2, 1e-3, 1e-4};
  MeshPolicy mesh;
  std::vector<double> ps{1.01, 1.1, 1.3};
  SolverOptions solver;
  VerifyOptions verify;
  std::uint64_t seed = 1;
  std::string out = "out";
  std::optional<Command> command;
};

/// Parses a JSON document with sections "problem", "mesh", "solver" and
/// "verify" plus top-level "rho", "p", "seed", "out" and "command". Every
/// schema problem is collected into one SchemaError; model assumptions are
/// then checked (ConstraintViolation) and the potentials are sampled for
/// positivity (NonpositiveSampled).
RunConfig parse_config(const std::string& text);

/// Parses a potential and rejects it if it is not positive at every node of
/// a mesh of `domain` with at least `min_samples` nodes.
Expression parse_potential(const std::string& text, const DomainSpec& domain, std::size_t min_samples = 1000);

/// Throws NonpositiveSampled naming the first offending sample.
void check_positive(const Expression& V, const char* name, const DomainSpec& domain, std::size_t min_samples = 1000);

/// Comma-separated list of reals; throws SchemaError.
std::vector<double> parse_list(const std::string& text, const char* what);

}  // namespace blowup
