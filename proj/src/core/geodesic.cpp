#include "ewm/geodesic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <boost/numeric/odeint.hpp>

#include "ewm/error.hpp"

namespace ewm {

namespace odeint = boost::numeric::odeint;

namespace {

constexpr double pi = std::numbers::pi;
using State4 = std::array<double, 4>;

double clamp_unit(double c) { return std::clamp(c, -1.0, 1.0); }

}  // namespace

GeodesicPath geodesic_trace(const SurfaceProfile& p, double r0, double theta0, double direction, double length,
                            double step, int sample_every) {
  const double R = p.R();
  if (!(r0 > 0.0 && r0 < R)) fail(ErrorCode::domain, "geodesic must start away from the poles");
  if (!(length >= 0.0) || !(step > 0.0) || sample_every < 1)
    fail(ErrorCode::invalid_argument, "geodesic_trace needs length >= 0, step > 0, sample_every >= 1");

  const Jet j0 = p.eval(r0);
  // (r, theta, dr/ds, dtheta/ds)
  State4 x{r0, theta0, std::cos(direction), std::sin(direction) / j0.f};
  auto rhs = [&p](const State4& s, State4& dsdt, double) {
    const Jet j = p.eval_extended(s[0]);
    dsdt[0] = s[2];
    dsdt[1] = s[3];
    dsdt[2] = j.f * j.fp * s[3] * s[3];
    dsdt[3] = -2.0 * (j.fp / j.f) * s[2] * s[3];
  };
  const double c0 = j0.f * j0.f * x[3];
  const double cscale = std::abs(c0) > 0.0 ? std::abs(c0) : 1.0;

  GeodesicPath path;
  path.points.push_back({0.0, r0, theta0});
  const long n = std::max(1L, static_cast<long>(std::ceil(length / step)));
  const double h = length / static_cast<double>(n);
  odeint::runge_kutta4<State4> rk;
  for (long i = 1; i <= n; ++i) {
    rk.do_step(rhs, x, 0.0, h);
    const double s = h * static_cast<double>(i);
    if (!(x[0] > 0.0 && x[0] < R)) {
      path.hit_pole = true;
      path.pole_arclength = s;
      break;
    }
    const Jet j = p.eval(x[0]);
    path.clairaut_drift = std::max(path.clairaut_drift, std::abs(j.f * j.f * x[3] - c0) / cscale);
    const double speed = std::sqrt(x[2] * x[2] + j.f * j.f * x[3] * x[3]);
    path.speed_error = std::max(path.speed_error, std::abs(speed - 1.0));
    if (i % sample_every == 0 || i == n) path.points.push_back({s, x[0], x[1]});
  }
  return path;
}

namespace {

struct Shot {
  bool reached = false;
  double mismatch = 0.0;
  double length = 0.0;
  double gb = 0.0;
  double r_end = 0.0;
  double psi_end = 0.0;
};

using State5 = std::array<double, 5>;

// Unit-speed geodesic from (r, 0) leaving at angle psi0 from +dr, followed until theta reaches `theta`.
// State: (r, theta, psi, arclength, integral of (1 - f') dtheta); psi obeys f sin(psi) = const.
Shot shoot(const SurfaceProfile& prof, double r, double rp, double theta, double psi0, double tol) {
  const double R = prof.R();
  auto rhs = [&prof](const State5& x, State5& dx, double) {
    const Jet j = prof.eval_extended(x[0]);
    const double sp = std::sin(x[2]);
    dx[0] = std::cos(x[2]);
    dx[1] = sp / j.f;
    dx[2] = -j.fp * sp / j.f;
    dx[3] = 1.0;
    dx[4] = -j.fp_minus_one * sp / j.f;
  };
  auto stepper = odeint::make_controlled(tol, tol, odeint::runge_kutta_dopri5<State5>());
  odeint::runge_kutta_dopri5<State5> plain;
  State5 x{r, 0.0, psi0, 0.0, 0.0};
  double s = 0.0;
  double ds = 1e-3 * std::min(1.0, std::max(r, 1e-12));
  const double s_max = 10.0 * R;
  Shot out;
  auto finish = [&](const State5& e) {
    out.reached = true;
    out.mismatch = e[0] - rp;
    out.length = e[3];
    out.gb = e[4];
    out.r_end = e[0];
    out.psi_end = e[2];
  };
  for (int iter = 0; iter < 200000 && s < s_max; ++iter) {
    State5 trial = x;
    double st = s, h = ds;
    if (stepper.try_step(rhs, trial, st, h) != odeint::success) {
      ds = h;
      if (ds < 1e-16 * std::max(1.0, s)) break;
      continue;
    }
    if (!std::isfinite(trial[0]) || trial[0] <= 0.0) {
      out.mismatch = -rp;
      return out;
    }
    if (trial[0] >= R) {
      out.mismatch = R - rp;
      return out;
    }
    if (trial[1] >= theta) {
      // theta is increasing in s; land on theta exactly by Newton on the last step length.
      double len = st - s;
      State5 e = trial;
      for (int k = 0; k < 30; ++k) {
        State5 dx;
        rhs(e, dx, 0.0);
        const double next = len - (e[1] - theta) / dx[1];
        len = std::clamp(next, 0.0, st - s);
        e = x;
        plain.reset();
        plain.do_step(rhs, e, s, len);
        if (std::abs(e[1] - theta) <= 4e-16 * std::max(1.0, theta)) break;
      }
      finish(e);
      return out;
    }
    x = trial;
    s = st;
    ds = h;
  }
  out.mismatch = std::numeric_limits<double>::quiet_NaN();
  return out;
}

GeodesicTriangle meridian_triangle(double r, double rp, double theta) {
  GeodesicTriangle t;
  t.r = r;
  t.rp = rp;
  t.theta = theta;
  t.d = std::abs(r - rp);
  t.y = t.d * t.d;
  if (rp > r) {
    t.alpha = 0.0;
    t.beta = pi;
  } else if (rp < r) {
    t.alpha = pi;
    t.beta = 0.0;
  } else {
    t.alpha = t.beta = 0.5 * pi;
  }
  return t;
}

}  // namespace

GeodesicTriangle geodesic_distance(const SurfaceProfile& p, double r, double rp, double theta,
                                   const DistanceOptions& opts) {
  const double R = p.R();
  if (!(r >= 0.0 && r <= R && rp >= 0.0 && rp <= R) || !std::isfinite(theta))
    fail(ErrorCode::domain, "geodesic_distance: radii must lie in [0, R]");
  // Reduce to theta in [0, pi] using rotation and reflection symmetry.
  double th = std::fmod(std::abs(theta), 2.0 * pi);
  if (th > pi) th = 2.0 * pi - th;
  if (th == 0.0 || r == 0.0 || rp == 0.0) return meridian_triangle(r, rp, th);

  // Near-meridian connections leave at angles within O(theta') of 0 or pi.
  const double edge = 1e-6 * pi * std::min(1.0, th);
  std::vector<double> psis;
  psis.push_back(edge);
  for (int k = 1; k < opts.scan; ++k) psis.push_back(pi * k / opts.scan);
  psis.push_back(pi - edge);
  std::vector<double> vals(psis.size());
  for (std::size_t i = 0; i < psis.size(); ++i) vals[i] = shoot(p, r, rp, th, psis[i], opts.tol).mismatch;

  std::optional<GeodesicTriangle> best;
  auto consider = [&](double psi) {
    const Shot s = shoot(p, r, rp, th, psi, opts.tol);
    if (!s.reached || std::abs(s.mismatch) > 1e-8 * std::max(1.0, rp)) return;
    if (best && best->d <= s.length) return;
    GeodesicTriangle t;
    t.r = r;
    t.rp = rp;
    t.theta = th;
    t.d = s.length;
    t.y = s.length * s.length;
    t.beta = pi - psi;
    t.alpha = s.psi_end;
    t.curvature_integral = s.gb;
    best = t;
  };

  for (std::size_t i = 0; i + 1 < psis.size(); ++i) {
    double a = psis[i], b = psis[i + 1], fa = vals[i], fb = vals[i + 1];
    if (!std::isfinite(fa) || !std::isfinite(fb)) continue;
    if (fa == 0.0) {
      consider(a);
      continue;
    }
    if ((fa < 0.0) == (fb < 0.0)) continue;
    auto g = [&](double psi) { return shoot(p, r, rp, th, psi, opts.tol).mismatch; };
    std::uintmax_t max_iter = 200;
    auto tolf = boost::math::tools::eps_tolerance<double>(std::numeric_limits<double>::digits - 2);
    try {
      auto [lo, hi] = boost::math::tools::toms748_solve(g, a, b, fa, fb, tolf, max_iter);
      consider(0.5 * (lo + hi));
    } catch (const std::exception&) {
      // Non-finite probe inside the bracket; skip it.
    }
  }

  if (th == pi && r + rp <= (best ? best->d : INFINITY)) {
    GeodesicTriangle t;
    t.r = r;
    t.rp = rp;
    t.theta = th;
    t.d = r + rp;
    t.y = t.d * t.d;
    t.through_pole = true;
    best = t;
  }

  if (!best) {
    std::ostringstream os;
    os << "geodesic shooting did not converge for (r, r', theta') = (" << r << ", " << rp << ", " << th
       << "); bracket scan:";
    for (std::size_t i = 0; i < psis.size(); ++i) os << " [" << psis[i] << ": " << vals[i] << "]";
    fail(ErrorCode::not_converged, os.str());
  }
  return *best;
}

ComparisonDistances comparison_distances(double r, double rp, double theta, double K) {
  if (!(r >= 0.0 && rp >= 0.0) || !std::isfinite(theta) || !std::isfinite(K))
    fail(ErrorCode::invalid_argument, "comparison_distances: invalid arguments");
  ComparisonDistances out;
  out.d0 = std::sqrt(std::max(0.0, r * r + rp * rp - 2.0 * r * rp * std::cos(theta)));
  if (K == 0.0) {
    out.dK = out.d0;
  } else if (K > 0.0) {
    const double k = std::sqrt(K);
    if (r >= pi / k || rp >= pi / k) fail(ErrorCode::domain, "radii exceed the model-space diameter pi/sqrt(K)");
    // Haversine form of the spherical law of cosines; accurate for short sides.
    const double a = std::sin(0.5 * k * (r - rp));
    const double b = std::sin(0.5 * theta);
    const double hav = a * a + std::sin(k * r) * std::sin(k * rp) * b * b;
    out.dK = 2.0 * std::asin(std::sqrt(std::clamp(hav, 0.0, 1.0))) / k;
  } else {
    const double k = std::sqrt(-K);
    const double a = std::sinh(0.5 * k * (r - rp));
    const double b = std::sin(0.5 * theta);
    const double hav = a * a + std::sinh(k * r) * std::sinh(k * rp) * b * b;
    out.dK = 2.0 * std::asinh(std::sqrt(std::max(hav, 0.0))) / k;
  }
  return out;
}

namespace {

// Angle at the vertex joining sides a and b, opposite side c, in the model space of curvature K.
double model_angle(double a, double b, double c, double K) {
  if (K == 0.0) return std::acos(clamp_unit((a * a + b * b - c * c) / (2.0 * a * b)));
  if (K > 0.0) {
    const double k = std::sqrt(K);
    return std::acos(
        clamp_unit((std::cos(k * c) - std::cos(k * a) * std::cos(k * b)) / (std::sin(k * a) * std::sin(k * b))));
  }
  const double k = std::sqrt(-K);
  return std::acos(
      clamp_unit((std::cosh(k * a) * std::cosh(k * b) - std::cosh(k * c)) / (std::sinh(k * a) * std::sinh(k * b))));
}

}  // namespace

ComparisonAngles comparison_angles(double r, double rp, double d, double K) {
  if (!(r >= 0.0 && rp >= 0.0 && d >= 0.0) || !std::isfinite(K))
    fail(ErrorCode::invalid_argument, "comparison_angles: sides must be non-negative");
  const double scale = std::max({r, rp, d});
  const double slack = 1e-12 * scale;
  if (d > r + rp + slack || r > d + rp + slack || rp > d + r + slack)
    fail(ErrorCode::domain, "comparison_angles: triangle inequality violated");
  if (K > 0.0 && std::max({r, rp, d}) >= pi / std::sqrt(K))
    fail(ErrorCode::domain, "comparison_angles: sides exceed the model-space diameter");
  ComparisonAngles out;
  const double flat = 1e-12 * scale;
  out.degenerate = d <= flat || rp <= flat || r <= flat || std::abs(d - (r + rp)) <= flat ||
                   std::abs(d - std::abs(r - rp)) <= flat;
  if (d <= flat || rp <= flat || r <= flat) {
    out.alpha0 = out.alphaK = out.beta0 = out.betaK = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  out.alpha0 = model_angle(d, rp, r, 0.0);
  out.beta0 = model_angle(d, r, rp, 0.0);
  out.alphaK = model_angle(d, rp, r, K);
  out.betaK = model_angle(d, r, rp, K);
  return out;
}

void attach_comparison(GeodesicTriangle& t, double K) {
  t.K = K;
  const auto cd = comparison_distances(t.r, t.rp, t.theta, K);
  t.d0 = cd.d0;
  t.dK = cd.dK;
  const auto ca = comparison_angles(t.r, t.rp, t.d, K);
  t.alpha0 = ca.alpha0;
  t.alphaK = ca.alphaK;
  t.beta0 = ca.beta0;
  t.betaK = ca.betaK;
}

double max_curvature(const SurfaceProfile& p, double a, double b, int samples) {
  a = std::clamp(a, 0.0, p.R());
  b = std::clamp(b, 0.0, p.R());
  double kmax = -INFINITY;
  for (int i = 0; i < samples; ++i) kmax = std::max(kmax, p.eval(a + (b - a) * i / std::max(1, samples - 1)).k);
  return kmax;
}

double eikonal_residual(const SurfaceProfile& p, double r, double rp, double theta, double h,
                        const DistanceOptions& opts) {
  if (!(h > 0.0)) fail(ErrorCode::invalid_argument, "eikonal_residual needs h > 0");
  auto y = [&](double a, double b) { return geodesic_distance(p, r, a, b, opts).y; };
  const double y0 = y(rp, theta);
  const double yr = (y(rp + h, theta) - y(rp - h, theta)) / (2.0 * h);
  const double yt = (y(rp, theta + h) - y(rp, theta - h)) / (2.0 * h);
  const double f = p.eval(rp).f;
  return std::abs(yr * yr + yt * yt / (f * f) - 4.0 * y0);
}

AngleReport angle_identities_check(const SurfaceProfile& p, const GeodesicTriangle& t,
                                   const AngleCheckOptions& opts) {
  AngleReport rep;
  const double h = opts.h;
  const auto& dopt = opts.distance;
  rep.sin_beta_over_rp = std::sin(t.beta) / t.rp;
  rep.sin_alpha_over_r = std::sin(t.alpha) / t.r;
  rep.sin_theta_over_d = std::sin(t.theta) / t.d;
  rep.remark7_residual = std::abs(p.eval(t.r).f * std::sin(t.beta) - p.eval(t.rp).f * std::sin(t.alpha));

  const auto plus_rp = geodesic_distance(p, t.r, t.rp + h, t.theta, dopt);
  const auto minus_rp = geodesic_distance(p, t.r, t.rp - h, t.theta, dopt);
  rep.dy_drp_fd = (plus_rp.y - minus_rp.y) / (2.0 * h);
  rep.dy_drp_exact = 2.0 * t.d * std::cos(t.alpha);
  rep.dy_drp_relerr = std::abs(rep.dy_drp_fd - rep.dy_drp_exact) / (2.0 * t.d);

  const double yt = (geodesic_distance(p, t.r, t.rp, t.theta + h, dopt).y -
                     geodesic_distance(p, t.r, t.rp, t.theta - h, dopt).y) /
                    (2.0 * h);
  const double frp = p.eval(t.rp).f;
  rep.eikonal_relerr =
      std::abs(rep.dy_drp_fd * rep.dy_drp_fd + yt * yt / (frp * frp) - 4.0 * t.y) / (4.0 * t.y);

  rep.gauss_bonnet_residual = std::abs(t.alpha + t.beta + t.theta - pi - t.curvature_integral);

  rep.ratio_m_min = INFINITY;
  rep.ratio_m_max = -INFINITY;
  const double mu = t.theta;
  for (int k = 1; k <= opts.ratio_samples; ++k) {
    const double th = mu * k / (opts.ratio_samples + 1);
    const double yk = geodesic_distance(p, t.r, t.rp, th, dopt).y;
    const double m = (std::cos(th) - std::cos(mu)) / (t.y - yk);
    rep.ratio_m_min = std::min(rep.ratio_m_min, m * t.r * t.rp);
    rep.ratio_m_max = std::max(rep.ratio_m_max, m * t.r * t.rp);
  }

  const double ap = geodesic_distance(p, t.r + h, t.rp, t.theta, dopt).alpha;
  const double am = geodesic_distance(p, t.r - h, t.rp, t.theta, dopt).alpha;
  rep.alpha_r = (ap - am) / (2.0 * h);
  const double K = opts.K > 0.0 ? opts.K : max_curvature(p, 0.0, t.r + t.rp);
  rep.alpha_r_lower = std::sin(t.beta) / t.d;
  rep.alpha_r_upper = K > 0.0 ? std::sqrt(K) * std::sin(t.beta) / std::sin(std::sqrt(K) * t.d) : rep.alpha_r_lower;
  const double slack = 1e-6 * std::max(1.0, std::abs(rep.alpha_r));
  rep.alpha_r_bracketed = rep.alpha_r >= rep.alpha_r_lower - slack && rep.alpha_r <= rep.alpha_r_upper + slack;
  return rep;
}

double lightcone_kernel_integral(const SurfaceProfile& p, double r, double rp, double s,
                                 const DistanceOptions& opts) {
  if (!(s >= 0.0) || !std::isfinite(s)) fail(ErrorCode::invalid_argument, "lightcone kernel needs s >= 0");
  if (s <= std::abs(r - rp)) return 0.0;
  const double s2 = s * s;
  auto y = [&](double th) { return geodesic_distance(p, r, rp, th, opts).y; };
  double mu = pi;
  const double ypi = y(pi);
  if (s2 < ypi) {
    std::uintmax_t max_iter = 200;
    auto tolf = boost::math::tools::eps_tolerance<double>(std::numeric_limits<double>::digits - 2);
    auto g = [&](double th) { return y(th) - s2; };
    auto [lo, hi] = boost::math::tools::toms748_solve(g, 0.0, pi, std::abs(r - rp) * std::abs(r - rp) - s2,
                                                      ypi - s2, tolf, max_iter);
    mu = 0.5 * (lo + hi);
  }
  const double frp = p.eval(rp).f;
  // theta = mu sin(t) removes the inverse square-root endpoint singularity.
  auto integrand = [&](double t) {
    const double c = std::cos(t);
    const double gap = s2 - y(mu * std::sin(t));
    return gap > 0.0 ? mu * c * frp / std::sqrt(gap) : 0.0;
  };
  const double half = boost::math::quadrature::gauss<double, 40>::integrate(integrand, 0.0, 0.5 * pi);
  return 2.0 * half;
}

}  // namespace ewm
