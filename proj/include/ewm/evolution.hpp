#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ewm/profile.hpp"
#include "ewm/stationary.hpp"

namespace ewm {

using Vec3 = std::array<double, 3>;

/// f at the nodes and at the cell midpoints of a grid.
struct GridCoefficients {
  std::vector<double> f_node;
  std::vector<double> f_mid;
};

/// Equivariant wave map u(t, r) on the nodes of a uniform grid; the pole nodes are pinned to +-e3.
struct FieldState {
  SurfaceProfile surface = SurfaceProfile::round();
  Grid grid;
  int l = 1;
  double t = 0.0;
  std::vector<Vec3> u;
  std::vector<Vec3> v;
  /// Filled on first use; shared between copies of a state.
  mutable std::shared_ptr<const GridCoefficients> coeffs;
};

const GridCoefficients& coefficients(const FieldState& s);

/// Rotation generator: A x = (-x2, x1, 0).
Vec3 rotate_generator(const Vec3& x);
/// exp(tau A) x.
Vec3 rotate(const Vec3& x, double tau);
FieldState rotated(const FieldState& s, double tau);

/// Constant map to the north pole with zero velocity.
FieldState pole_state(const SurfaceProfile& surface, int N, int l);

/// u = (g(phi), 0, cos(phi)), v = omega A u. Refuses unconverged solutions.
FieldState state_from_stationary(const StationarySolution& sol, double omega);

/// Adds delta b(r) e_phi to u and delta b_v(r) e_phi to v, then re-projects. The pair (b, b_v)
/// has unit H^1 x L^2 norm, so the distance to the input is delta to first order.
/// `shape` selects the seeded mode mix; delta = 0 returns the input unchanged.
FieldState perturb_state(const FieldState& s, double delta, int shape, std::uint64_t seed);

/// max | |u_i| - 1 | and max |u_i . v_i|.
struct ConstraintReport {
  double norm_error = 0.0;
  double tangency_error = 0.0;
};
ConstraintReport constraint_errors(const FieldState& s);

/// Largest admissible |dt| for a given CFL number.
double cfl_step(const FieldState& s, double cfl);

/// Reversible kick-drift-kick update without the final projection.
void step_raw(FieldState& s, double dt);
/// Renormalizes u and removes the normal component of v on interior nodes.
void project(FieldState& s);
/// One full step: step_raw then project. |dt| above the cfl = 1 bound is refused.
void step(FieldState& s, double dt);

/// u_tt on interior nodes for the current state (zero at the poles).
std::vector<Vec3> acceleration(const FieldState& s);

struct RunOptions {
  double T = 1.0;
  double cfl = 0.4;
  /// Snapshot every this many steps (the initial and final states are always kept).
  int record_every = 20;
  /// Abort when constraints drift beyond this before projection.
  double constraint_limit = 1e-2;
};

struct RunResult {
  std::vector<FieldState> snapshots;
  FieldState final_state;
  double dt = 0.0;
  long steps = 0;
  bool aborted = false;
  std::string failure;
};

RunResult run(const FieldState& initial, const RunOptions& opts);

}  // namespace ewm
