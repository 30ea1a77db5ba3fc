#pragma once

#include <vector>

#include "ewm/profile.hpp"

namespace ewm {

struct PathPoint {
  double s = 0.0;
  double r = 0.0;
  double theta = 0.0;
};

struct GeodesicPath {
  std::vector<PathPoint> points;
  /// Relative drift of f^2 dtheta/ds (absolute when the invariant is zero).
  double clairaut_drift = 0.0;
  /// max | |velocity| - 1 |.
  double speed_error = 0.0;
  bool hit_pole = false;
  double pole_arclength = 0.0;
};

/// Unit-speed geodesic from (r, theta); `direction` is measured from +dr towards +dtheta.
GeodesicPath geodesic_trace(const SurfaceProfile& p, double r0, double theta0, double direction, double length,
                            double step = 1e-4, int sample_every = 1);

/// Triangle with vertices at the north pole, (r, 0) and (r', theta').
struct GeodesicTriangle {
  double r = 0.0;
  double rp = 0.0;
  double theta = 0.0;
  double d = 0.0;
  double y = 0.0;
  /// Angle at (r', theta'), opposite the side of length r.
  double alpha = 0.0;
  /// Angle at (r, 0), opposite the side of length r'.
  double beta = 0.0;
  /// Integral of k dA over the triangle, accumulated along the connecting geodesic.
  double curvature_integral = 0.0;
  bool through_pole = false;

  double K = 0.0;
  double d0 = 0.0;
  double dK = 0.0;
  double alpha0 = 0.0;
  double alphaK = 0.0;
  double beta0 = 0.0;
  double betaK = 0.0;
};

struct DistanceOptions {
  double tol = 1e-13;
  /// Initial directions probed for sign changes of the terminal mismatch.
  int scan = 12;
};

/// Minimal geodesic between (r, 0) and (r', theta') by shooting in the initial direction.
GeodesicTriangle geodesic_distance(const SurfaceProfile& p, double r, double rp, double theta,
                                   const DistanceOptions& opts = {});

struct ComparisonDistances {
  double d0 = 0.0;
  double dK = 0.0;
};

/// Flat and constant-curvature K law of cosines.
ComparisonDistances comparison_distances(double r, double rp, double theta, double K);

struct ComparisonAngles {
  double alpha0 = 0.0;
  double alphaK = 0.0;
  double beta0 = 0.0;
  double betaK = 0.0;
  bool degenerate = false;
};

ComparisonAngles comparison_angles(double r, double rp, double d, double K);

/// Fills the comparison fields of `t` for curvature bound K.
void attach_comparison(GeodesicTriangle& t, double K);

double max_curvature(const SurfaceProfile& p, double a, double b, int samples = 2001);

/// |y_{r'}^2 + y_{theta'}^2 / f(r')^2 - 4y| by central differences of step h.
double eikonal_residual(const SurfaceProfile& p, double r, double rp, double theta, double h,
                        const DistanceOptions& opts = {});

struct AngleCheckOptions {
  double h = 1e-4;
  /// Curvature bound for the upper angle-derivative bracket; <= 0 selects max k on [0, r + r'].
  double K = 0.0;
  int ratio_samples = 12;
  DistanceOptions distance;
};

struct AngleReport {
  double sin_beta_over_rp = 0.0;
  double sin_alpha_over_r = 0.0;
  double sin_theta_over_d = 0.0;
  double remark7_residual = 0.0;
  double dy_drp_fd = 0.0;
  double dy_drp_exact = 0.0;
  /// |fd - 2 d cos alpha| / (2 d).
  double dy_drp_relerr = 0.0;
  /// Eikonal residual divided by 4y.
  double eikonal_relerr = 0.0;
  double gauss_bonnet_residual = 0.0;
  /// Range of m r r' over theta'' in (0, theta') with mu = theta'.
  double ratio_m_min = 0.0;
  double ratio_m_max = 0.0;
  double alpha_r = 0.0;
  double alpha_r_lower = 0.0;
  double alpha_r_upper = 0.0;
  bool alpha_r_bracketed = false;
};

AngleReport angle_identities_check(const SurfaceProfile& p, const GeodesicTriangle& t,
                                   const AngleCheckOptions& opts = {});

/// Integral over {theta' : d(r, r', theta')^2 <= s^2} of f(r') / sqrt(s^2 - d^2) dtheta'.
double lightcone_kernel_integral(const SurfaceProfile& p, double r, double rp, double s,
                                 const DistanceOptions& opts = {});

}  // namespace ewm
