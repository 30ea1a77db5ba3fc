#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ewm/evolution.hpp"
#include "ewm/stationary.hpp"

namespace ewm {

/// Nodal energy density e = (|u_t|^2 + |u_r|^2 + l^2 |Au|^2 / f^2) / 2 and m = u_t . u_r.
struct Densities {
  std::vector<double> e;
  std::vector<double> m;
};
/// Central differences for u_r on interior nodes, one-sided at the poles.
Densities energy_densities(const FieldState& s);

/// E = 2 pi int e f dr, kinetic and centrifugal terms on nodes, gradient term on cells.
double energy(const FieldState& s);
/// Q = 2 pi int (Au . u_t) f dr.
double charge(const FieldState& s);
/// D = pi int |u_t - omega A u|^2 f dr.
double rotation_defect(const FieldState& s, double omega);
/// G_omega of the spatial slice, same quadrature as energy().
double gee_omega_state(const FieldState& s, double omega);
/// |E - (G_omega + omega Q + D)|.
double energy_identity_residual(const FieldState& s, double omega);

/// Energy in the polar cap r <= radius (fractional control volumes at the cut).
double local_energy(const FieldState& s, double radius);

struct ConeCheck {
  bool holds = true;
  /// max(0, E_{R+T1-T2}(T2) - E_R(T1)).
  double violation = 0.0;
  double e1 = 0.0;
  double e2 = 0.0;
};
/// E_radius(u(T1)) >= E_{radius + T1 - T2}(u(T2)) - tol. Empty shrunken cap is vacuously true.
ConeCheck cone_monotonicity_check(const FieldState& at_t1, const FieldState& at_t2, double radius, double tol);

/// Characteristic densities with d_eta = d_t + d_r and d_xi = d_t - d_r.
struct CharacteristicFields {
  std::vector<double> a;  ///< script A
  std::vector<double> b;  ///< script B
  double X = 0.0;         ///< max f^(1/2 - delta) A
};
CharacteristicFields characteristic_densities(const FieldState& s, double delta);

/// Flux of (e - m) through the backward cone with tip (t_tip, r = 0) down to the earliest snapshot
/// time t0 (or t_tip - R if later). Snapshots must be time-ordered.
double flux_on_cone(const std::vector<FieldState>& snapshots, double t_tip);

/// sup over r of |Q(u)| f / (A B) where Q(u) = |u_t|^2 - |u_r|^2 - l^2|Au|^2/f^2; empty when A B vanishes.
std::optional<double> nonlinearity_ratio(const FieldState& s);

/// H^1 x L^2 norm squared of a state difference.
double energy_norm_sq(const FieldState& a, const FieldState& b);

struct OrbitDistance {
  double d = 0.0;
  double tau = 0.0;
};
/// Distance to the rotation orbit of `reference`, minimized over the angle in closed form.
OrbitDistance distance_to_orbit(const FieldState& s, const FieldState& reference);
OrbitDistance distance_to_orbit(const FieldState& s, const StationarySolution& sol, double omega);

struct DiagnosticsRecord {
  double t = 0.0;
  double E = 0.0;
  double Q = 0.0;
  double D = 0.0;
  double G = 0.0;
  double identity_residual = 0.0;
  double X = 0.0;
  double flux = 0.0;
  double dist = 0.0;
};

/// One record per snapshot; X is the running max, flux uses the cone tipped at each record time.
/// `reference` (optional) supplies the orbit for dist.
std::vector<DiagnosticsRecord> diagnostics_series(const std::vector<FieldState>& snapshots, double omega,
                                                  double delta_hoelder, const FieldState* reference = nullptr);

struct Drifts {
  double energy = 0.0;
  double charge = 0.0;
};
/// max |E(t) - E(0)| / E(0) and max |Q(t) - Q(0)| / max(|Q(0)|, E(0)).
Drifts relative_drifts(const std::vector<DiagnosticsRecord>& series);

struct StabilityOptions {
  double delta = 1e-3;
  double T = 1.0;
  double epsilon = 1e-2;
  int shape = 0;
  std::uint64_t seed = 0;
  RunOptions run;
  double delta_hoelder = 0.1;
};

struct StabilityResult {
  std::vector<DiagnosticsRecord> series;
  double sup_dist = 0.0;
  bool stable = false;
  Drifts drifts;
  RunResult run;
};

/// Perturbs the stationary data, evolves, records dist(t); stable when sup dist <= epsilon.
StabilityResult stability_experiment(const StationarySolution& sol, double omega, const StabilityOptions& opts);

}  // namespace ewm
