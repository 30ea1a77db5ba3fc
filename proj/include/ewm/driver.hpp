#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "ewm/config.hpp"
#include "ewm/diagnostics.hpp"
#include "ewm/profile.hpp"

namespace ewm {

/// One pass/fail line of a check suite.
struct Check {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool passed = false;
  /// Convergence rate when the check is a refinement study (NaN otherwise).
  double rate = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> constants;
};

/// Comparison, identity and finite-difference checks on sampled geodesic triangles near the pole.
std::vector<Check> geometry_suite(const SurfaceProfile& p, int samples, std::uint64_t seed);
/// Intertwining rates for l = 0..3, pole-bounded coefficients, w round trip and the chart Christoffel checks.
std::vector<Check> regularity_suite(const SurfaceProfile& p, int l);

struct ConeAudit {
  /// max over records of flux - E(0).
  double flux_excess = 0.0;
  /// max violation of the cone inequality relative to E(0), and the number of sampled triples.
  double cone_violation = 0.0;
  int cone_samples = 0;
};
ConeAudit cone_audit(const std::vector<FieldState>& snapshots, const std::vector<DiagnosticsRecord>& series);

struct CommandResult {
  int exit_code = 0;
  std::string summary;
  std::vector<std::string> files;
};

/// Runs validate | stationary | evolve | stability | geometry-check | regularity-check and writes the
/// artifacts under cfg.output.directory. Exit codes: 0 ok or stable, 1 failed check or unstable,
/// 2 configuration error, refusal or solver non-convergence, 3 evolution abort.
CommandResult run_command(const RunConfig& cfg, const std::string& subcommand);

}  // namespace ewm
