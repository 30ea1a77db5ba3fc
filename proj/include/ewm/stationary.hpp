#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ewm/profile.hpp"

namespace ewm {

/// Uniform nodes r_i = i h, i = 0..N, h = R / N.
struct Grid {
  double R = 0.0;
  int N = 0;

  Grid() = default;
  Grid(double R_, int N_);
  double h() const { return R / N; }
  double r(int i) const { return i == N ? R : R * i / N; }
  std::vector<double> nodes() const;
};

struct BoundaryExponents {
  double a_left = 0.0;
  double p_left = 0.0;
  double a_right = 0.0;
  double p_right = 0.0;
};

struct StationaryOptions {
  /// Bound on the weighted norm of the stationarity residual.
  double tol = 1e-8;
  int max_iter = 500;
  /// Projected gradient sweeps before switching to Newton.
  int descent_iter = 20;
  bool newton_polish = true;
  bool multistart = false;
  std::uint64_t seed = 0;
};

struct StationarySolution {
  SurfaceProfile surface = SurfaceProfile::round();
  TargetProfile target = TargetProfile::round();
  Grid grid;
  std::vector<double> phi;
  int l = 1;
  double omega = 0.0;
  double action = 0.0;
  /// Weighted norm of the stationarity residual (normalized discrete gradient).
  double residual_norm = 0.0;
  /// Weighted norm of the pointwise finite-difference residual of the EL equation.
  double el_residual_norm = 0.0;
  double gradient_norm = 0.0;
  BoundaryExponents exponents;
  bool converged = false;
  int iterations = 0;
  /// Action after every accepted step, starting with the initial guess.
  std::vector<double> action_history;
  /// Actions of all multistart candidates, in order of attempt.
  std::vector<double> multistart_actions;
};

/// Discrete reduced action: midpoint rule for (phi')^2 f, nodal rule for the potential term.
double reduced_action(const SurfaceProfile& s, const TargetProfile& t, std::span<const double> phi, int l,
                      double omega);

/// Gradient with respect to the interior nodes; endpoint entries are zero.
std::vector<double> reduced_action_gradient(const SurfaceProfile& s, const TargetProfile& t,
                                            std::span<const double> phi, int l, double omega);

/// -grad_i / (2 pi h f_i): the discrete EL equation the minimizer satisfies exactly.
std::vector<double> stationarity_residual(const SurfaceProfile& s, const TargetProfile& t,
                                          std::span<const double> phi, int l, double omega);

/// Pointwise phi'' + (f'/f) phi' + (omega^2 - l^2/f^2) g g' by central differences; endpoints zero.
std::vector<double> el_residual(const SurfaceProfile& s, const TargetProfile& t, std::span<const double> phi, int l,
                                double omega);

/// sqrt(sum_i h f_i res_i^2).
double el_residual_norm(const SurfaceProfile& s, std::span<const double> residual);

/// H (1 - cos(pi r / R)) / 2 on the grid.
std::vector<double> default_initial_guess(const Grid& grid, double H);

StationarySolution solve_stationary(const SurfaceProfile& s, const TargetProfile& t, int l, double omega, int N,
                                    const std::vector<double>* init = nullptr, const StationaryOptions& opts = {});

int degree_of(const TargetProfile& t, double phi_left, double phi_right, int l);

/// Reduced action plus pi * integral of (zeta')^2 g(phi)^2 f.
double gee_omega(const SurfaceProfile& s, const TargetProfile& t, std::span<const double> phi,
                 std::span<const double> zeta, int l, double omega);

/// Least-squares fit of log phi against log r on nodes 1..10 and the mirror fit at r = R.
BoundaryExponents boundary_exponent_fit(const Grid& grid, std::span<const double> phi, double H);
BoundaryExponents boundary_exponent_fit(const StationarySolution& sol);

}  // namespace ewm
