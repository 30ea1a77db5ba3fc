#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ewm/profile.hpp"

namespace ewm {

struct RunConfig {
  struct Surface {
    std::string kind = "round";
    double epsilon = 0.05;
    std::string table;
    double R = 1.0;
  } surface;
  struct Target {
    std::string kind = "round";
  } target;
  int l = 1;
  double omega = 0.0;
  struct GridCfg {
    int N = 2000;
  } grid;
  struct Solver {
    double tol = 1e-8;
    int max_iter = 500;
    bool multistart = false;
    std::uint64_t seed = 0;
  } solver;
  struct Evolve {
    double T = 1.0;
    double cfl = 0.4;
    int record_every = 20;
    double delta = 0.0;
    int shape = 0;
    double constraint_limit = 1e-2;
  } evolve;
  struct Stability {
    double delta = 1e-3;
    double epsilon = 1e-2;
    std::uint64_t seed = 0;
    int shape = 0;
  } stability;
  struct Diagnostics {
    double delta_hoelder = 0.1;
  } diagnostics;
  struct Geometry {
    int samples = 1000;
  } geometry;
  struct Output {
    std::string directory = "out";
    std::vector<std::string> formats{"csv", "json"};
  } output;

  /// Canonical JSON of every field, keys sorted.
  std::string canonical_json() const;
  /// FNV-1a 64 of the canonical JSON without the output section, as 16 hex digits.
  std::string hash() const;
  bool wants(const std::string& format) const;
  SurfaceProfile make_surface() const;
};

/// Parses a JSON document, applies `key.path=value` overrides, fills defaults and validates.
/// Relative table paths resolve against `base_dir`. Errors carry ErrorCode::config and the field path.
RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {},
                       const std::string& base_dir = "");
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

}  // namespace ewm
