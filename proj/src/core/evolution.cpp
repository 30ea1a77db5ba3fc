#include "ewm/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "ewm/error.hpp"

namespace ewm {

namespace {

constexpr double pi = std::numbers::pi;

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
Vec3 axpy(double a, const Vec3& x, const Vec3& y) { return {a * x[0] + y[0], a * x[1] + y[1], a * x[2] + y[2]}; }
Vec3 scale(double a, const Vec3& x) { return {a * x[0], a * x[1], a * x[2]}; }

void check_state(const FieldState& s) {
  const std::size_t n = static_cast<std::size_t>(s.grid.N) + 1;
  if (s.grid.N < 16 || s.u.size() != n || s.v.size() != n)
    fail(ErrorCode::invalid_argument, "field state arrays do not match the grid");
  if (s.l < 0) fail(ErrorCode::invalid_argument, "rotation number must be non-negative");
}

}  // namespace

Vec3 rotate_generator(const Vec3& x) { return {-x[1], x[0], 0.0}; }

Vec3 rotate(const Vec3& x, double tau) {
  const double c = std::cos(tau), s = std::sin(tau);
  return {c * x[0] - s * x[1], s * x[0] + c * x[1], x[2]};
}

FieldState rotated(const FieldState& s, double tau) {
  FieldState out = s;
  for (auto& x : out.u) x = rotate(x, tau);
  for (auto& x : out.v) x = rotate(x, tau);
  return out;
}

const GridCoefficients& coefficients(const FieldState& s) {
  const std::size_t n = static_cast<std::size_t>(s.grid.N) + 1;
  if (!s.coeffs || s.coeffs->f_node.size() != n) {
    auto c = std::make_shared<GridCoefficients>();
    const double h = s.grid.h();
    c->f_node.resize(n);
    c->f_mid.resize(n - 1);
    for (int i = 0; i <= s.grid.N; ++i) c->f_node[i] = s.surface.eval(s.grid.r(i)).f;
    for (int i = 0; i < s.grid.N; ++i) c->f_mid[i] = s.surface.eval(std::min(s.grid.R, (i + 0.5) * h)).f;
    s.coeffs = std::move(c);
  }
  return *s.coeffs;
}

FieldState pole_state(const SurfaceProfile& surface, int N, int l) {
  FieldState s;
  s.surface = surface;
  s.grid = Grid(surface.R(), N);
  s.l = l;
  s.u.assign(N + 1, Vec3{0.0, 0.0, 1.0});
  s.v.assign(N + 1, Vec3{0.0, 0.0, 0.0});
  return s;
}

FieldState state_from_stationary(const StationarySolution& sol, double omega) {
  if (!sol.converged) fail(ErrorCode::invalid_argument, "unconverged stationary solution refused");
  if (!sol.target.is_round()) fail(ErrorCode::invalid_argument, "only the round target embeds as the unit sphere");
  FieldState s;
  s.surface = sol.surface;
  s.grid = sol.grid;
  s.l = sol.l;
  const int N = sol.grid.N;
  s.u.resize(N + 1);
  s.v.resize(N + 1);
  for (int i = 0; i <= N; ++i) {
    const double phi = sol.phi[i];
    const bool pole = i == 0 || i == N;
    s.u[i] = {pole ? 0.0 : sol.target.g(phi), 0.0, std::cos(phi)};
    s.v[i] = scale(omega, rotate_generator(s.u[i]));
  }
  return s;
}

FieldState perturb_state(const FieldState& s, double delta, int shape, std::uint64_t seed) {
  check_state(s);
  if (!(delta >= 0.0) || !std::isfinite(delta)) fail(ErrorCode::invalid_argument, "perturbation size must be >= 0");
  if (shape < 0 || shape > 1) fail(ErrorCode::invalid_argument, "perturbation shape must be 0 or 1");
  if (delta == 0.0) return s;
  std::array<double, 3> a{1.0, 0.0, 0.0}, av{1.0, 0.0, 0.0};
  if (shape == 1) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    for (auto& x : a) x = coef(rng);
    for (auto& x : av) x = coef(rng);
  }
  const int N = s.grid.N;
  const auto& c = coefficients(s);
  const double h = s.grid.h();
  const double l2 = static_cast<double>(s.l) * s.l;
  // Tangent direction field and the two bump profiles.
  std::vector<Vec3> du(N + 1, Vec3{0.0, 0.0, 0.0}), dv(N + 1, Vec3{0.0, 0.0, 0.0});
  for (int i = 1; i < N; ++i) {
    const double x = pi * i / N;
    const double env = std::pow(std::sin(x), s.l + 1);
    const double b = env * (a[0] * std::sin(x) + a[1] * std::sin(2 * x) + a[2] * std::sin(3 * x));
    const double bv = env * (av[0] * std::sin(x) + av[1] * std::sin(2 * x) + av[2] * std::sin(3 * x));
    const Vec3& u = s.u[i];
    // Unit tangent pointing away from the north pole; e1 direction on the polar axis.
    Vec3 e = axpy(u[2], u, Vec3{0.0, 0.0, -1.0});
    double ne = std::sqrt(dot(e, e));
    if (ne < 1e-12) {
      e = axpy(-u[0], u, Vec3{1.0, 0.0, 0.0});
      ne = std::sqrt(dot(e, e));
    }
    du[i] = scale(b / ne, e);
    dv[i] = scale(bv / ne, e);
  }
  // Normalize to unit H^1 x L^2 norm so that delta is the size of the perturbation.
  double norm2 = 0.0;
  for (int i = 1; i < N; ++i) {
    const double f = c.f_node[i];
    const double au = du[i][0] * du[i][0] + du[i][1] * du[i][1];
    norm2 += h * f * (dot(du[i], du[i]) + l2 * au / (f * f) + dot(dv[i], dv[i]));
  }
  for (int i = 0; i < N; ++i) {
    const Vec3 d{du[i + 1][0] - du[i][0], du[i + 1][1] - du[i][1], du[i + 1][2] - du[i][2]};
    norm2 += c.f_mid[i] * dot(d, d) / h;
  }
  const double unit = 1.0 / std::sqrt(2.0 * pi * norm2);
  FieldState out = s;
  for (int i = 1; i < N; ++i) {
    const Vec3 w = axpy(delta * unit, du[i], s.u[i]);
    const double nw = std::sqrt(dot(w, w));
    if (nw < 0.5) {
      std::ostringstream os;
      os << "perturbation too large: |u| = " << nw << " at node " << i;
      fail(ErrorCode::domain, os.str());
    }
    out.u[i] = scale(1.0 / nw, w);
    const Vec3 v = axpy(delta * unit, dv[i], s.v[i]);
    out.v[i] = axpy(-dot(v, out.u[i]), out.u[i], v);
  }
  return out;
}

ConstraintReport constraint_errors(const FieldState& s) {
  ConstraintReport r;
  for (std::size_t i = 0; i < s.u.size(); ++i) {
    r.norm_error = std::max(r.norm_error, std::abs(std::sqrt(dot(s.u[i], s.u[i])) - 1.0));
    r.tangency_error = std::max(r.tangency_error, std::abs(dot(s.u[i], s.v[i])));
  }
  return r;
}

double cfl_step(const FieldState& s, double cfl) { return cfl * s.grid.h() / (1.0 + s.l); }

namespace {

// Tangential force T(u) = w - (u.w) u with w = Delta_h u + (l^2/f^2) A^2 u.
Vec3 tangential_force(const FieldState& s, const GridCoefficients& c, int i) {
  const double h = s.grid.h();
  const Vec3& um = s.u[i - 1];
  const Vec3& u = s.u[i];
  const Vec3& up = s.u[i + 1];
  const double fp = c.f_mid[i], fm = c.f_mid[i - 1], f = c.f_node[i];
  const double inv = 1.0 / (h * h * f);
  const double cen = static_cast<double>(s.l) * s.l / (f * f);
  Vec3 w;
  for (int k = 0; k < 3; ++k) w[k] = (fp * (up[k] - u[k]) - fm * (u[k] - um[k])) * inv;
  w[0] -= cen * u[0];
  w[1] -= cen * u[1];
  return axpy(-dot(u, w), u, w);
}

std::vector<Vec3> forces(const FieldState& s) {
  const auto& c = coefficients(s);
  std::vector<Vec3> T(s.u.size(), Vec3{0.0, 0.0, 0.0});
  for (int i = 1; i < s.grid.N; ++i) T[i] = tangential_force(s, c, i);
  return T;
}

}  // namespace

std::vector<Vec3> acceleration(const FieldState& s) {
  check_state(s);
  auto a = forces(s);
  for (int i = 1; i < s.grid.N; ++i) a[i] = axpy(-dot(s.v[i], s.v[i]), s.u[i], a[i]);
  return a;
}

void step_raw(FieldState& s, double dt) {
  check_state(s);
  const int N = s.grid.N;
  const double kappa = 0.5 * dt;
  // Half kick, implicit in the multiplier: v_h = b - c u with c = kappa |v_h|^2 (small root).
  const auto T0 = forces(s);
  for (int i = 1; i < N; ++i) {
    const Vec3& u = s.u[i];
    const Vec3 b = axpy(kappa, T0[i], s.v[i]);
    const double bu = dot(b, u), bb = dot(b, b), uu = dot(u, u);
    const double lin = 1.0 + 2.0 * kappa * bu;
    const double disc = lin * lin - 4.0 * kappa * kappa * uu * bb;
    const double c = 2.0 * kappa * bb / (lin + std::copysign(std::sqrt(disc), lin));
    s.v[i] = axpy(-c, u, b);
  }
  for (int i = 1; i < N; ++i) s.u[i] = axpy(dt, s.v[i], s.u[i]);
  const auto T1 = forces(s);
  for (int i = 1; i < N; ++i) {
    const double vv = dot(s.v[i], s.v[i]);
    s.v[i] = axpy(kappa, axpy(-vv, s.u[i], T1[i]), s.v[i]);
  }
  s.t += dt;
}

void project(FieldState& s) {
  for (int i = 1; i < s.grid.N; ++i) {
    s.u[i] = scale(1.0 / std::sqrt(dot(s.u[i], s.u[i])), s.u[i]);
    s.v[i] = axpy(-dot(s.u[i], s.v[i]), s.u[i], s.v[i]);
  }
}

void step(FieldState& s, double dt) {
  const double bound = cfl_step(s, 1.0);
  if (!(std::abs(dt) <= bound)) {
    std::ostringstream os;
    os << "time step " << dt << " violates the CFL bound " << bound;
    fail(ErrorCode::invalid_argument, os.str());
  }
  step_raw(s, dt);
  project(s);
}

RunResult run(const FieldState& initial, const RunOptions& opts) {
  check_state(initial);
  if (!(opts.cfl > 0.0 && opts.cfl < 1.0)) {
    std::ostringstream os;
    os << "cfl = " << opts.cfl << " refused; it must lie in (0, 1)";
    fail(ErrorCode::invalid_argument, os.str());
  }
  if (!(opts.T > 0.0) || opts.record_every < 1)
    fail(ErrorCode::invalid_argument, "run needs T > 0 and record_every >= 1");
  RunResult res;
  const long n = static_cast<long>(std::ceil(opts.T / cfl_step(initial, opts.cfl)));
  res.dt = opts.T / static_cast<double>(n);
  FieldState s = initial;
  coefficients(s);
  const double t0 = s.t;
  res.snapshots.push_back(s);
  FieldState last_good = s;
  for (long k = 1; k <= n; ++k) {
    step_raw(s, res.dt);
    s.t = t0 + res.dt * static_cast<double>(k);
    const auto ce = constraint_errors(s);
    if (!std::isfinite(ce.norm_error) || !std::isfinite(ce.tangency_error)) {
      std::ostringstream os;
      os << "NaN detected at step " << k << " (t = " << s.t << "); returning the state at t = " << last_good.t;
      res.aborted = true;
      res.failure = os.str();
      break;
    }
    if (ce.norm_error > opts.constraint_limit) {
      std::ostringstream os;
      os << "constraint blow-up at step " << k << " (t = " << s.t << "): max | |u| - 1 | = " << ce.norm_error;
      res.aborted = true;
      res.failure = os.str();
      break;
    }
    project(s);
    last_good = s;
    res.steps = k;
    if (k % opts.record_every == 0 || k == n) res.snapshots.push_back(s);
  }
  res.final_state = last_good;
  return res;
}

}  // namespace ewm
