#include "ewm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ewm/error.hpp"

namespace ewm {

namespace {

constexpr double pi = std::numbers::pi;

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Vec3 add(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
// |Ax|^2
double planar_sq(const Vec3& x) { return x[0] * x[0] + x[1] * x[1]; }

void require_same_grid(const FieldState& a, const FieldState& b) {
  if (a.grid.N != b.grid.N || a.grid.R != b.grid.R || a.l != b.l)
    fail(ErrorCode::invalid_argument, "states live on different grids or equivariance classes");
}

// l^2 |Ax|^2 / f^2 on interior nodes, zero at the poles.
double centrifugal(const FieldState& s, const GridCoefficients& c, int i, const Vec3& x) {
  if (i == 0 || i == s.grid.N) return 0.0;
  const double f = c.f_node[i];
  return static_cast<double>(s.l) * s.l * planar_sq(x) / (f * f);
}

// Nodal part pi f (|v|^2 + centrifugal) and cell part pi f_mid |du|^2 / h^2, both per unit length.
struct EnergyParts {
  std::vector<double> node;
  std::vector<double> cell;
};

EnergyParts energy_parts(const FieldState& s) {
  const auto& c = coefficients(s);
  const int N = s.grid.N;
  const double h = s.grid.h();
  EnergyParts p;
  p.node.assign(N + 1, 0.0);
  p.cell.assign(N, 0.0);
  for (int i = 1; i < N; ++i)
    p.node[i] = pi * c.f_node[i] * (dot(s.v[i], s.v[i]) + centrifugal(s, c, i, s.u[i]));
  for (int i = 0; i < N; ++i) {
    const Vec3 d = sub(s.u[i + 1], s.u[i]);
    p.cell[i] = pi * c.f_mid[i] * dot(d, d) / (h * h);
  }
  return p;
}

double overlap(double a, double b, double lo, double hi) { return std::max(0.0, std::min(b, hi) - std::max(a, lo)); }

// Integrand 2 pi f (e - m) on the nodes.
std::vector<double> cone_integrand(const FieldState& s) {
  const auto d = energy_densities(s);
  const auto& c = coefficients(s);
  std::vector<double> g(d.e.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = 2.0 * pi * c.f_node[i] * (d.e[i] - d.m[i]);
  return g;
}

double interpolate(const std::vector<double>& g, const Grid& grid, double r) {
  if (r <= 0.0) return g.front();
  if (r >= grid.R) return g.back();
  const double x = r / grid.h();
  const int i = std::min(static_cast<int>(x), grid.N - 1);
  const double w = x - i;
  return (1.0 - w) * g[i] + w * g[i + 1];
}

double flux_from(const std::vector<double>& times, const std::vector<std::vector<double>>& integrand, const Grid& grid,
                 double t_tip) {
  if (times.empty()) fail(ErrorCode::invalid_argument, "no snapshots recorded");
  const double eps = 1e-12 * std::max(1.0, std::abs(t_tip));
  if (t_tip < times.front() - eps || t_tip > times.back() + eps) {
    std::ostringstream os;
    os << "cone tip t = " << t_tip << " outside the recorded window [" << times.front() << ", " << times.back() << "]";
    fail(ErrorCode::invalid_argument, os.str());
  }
  const double t_base = std::max(times.front(), t_tip - grid.R);
  double total = 0.0, prev_t = 0.0, prev_g = 0.0;
  bool started = false;
  for (std::size_t k = 0; k < times.size() && times[k] <= t_tip + eps; ++k) {
    if (times[k] < t_base - eps) continue;
    const double g = interpolate(integrand[k], grid, t_tip - times[k]);
    if (started) total += 0.5 * (times[k] - prev_t) * (g + prev_g);
    prev_t = times[k];
    prev_g = g;
    started = true;
  }
  // The integrand vanishes at the tip, where f = 0.
  if (started && t_tip > prev_t + eps) total += 0.5 * (t_tip - prev_t) * prev_g;
  return total;
}

}  // namespace

Densities energy_densities(const FieldState& s) {
  const auto& c = coefficients(s);
  const int N = s.grid.N;
  const double h = s.grid.h();
  Densities d;
  d.e.assign(N + 1, 0.0);
  d.m.assign(N + 1, 0.0);
  for (int i = 0; i <= N; ++i) {
    Vec3 ur;
    if (i == 0) {
      for (int k = 0; k < 3; ++k) ur[k] = (-3 * s.u[0][k] + 4 * s.u[1][k] - s.u[2][k]) / (2 * h);
    } else if (i == N) {
      for (int k = 0; k < 3; ++k) ur[k] = (3 * s.u[N][k] - 4 * s.u[N - 1][k] + s.u[N - 2][k]) / (2 * h);
    } else {
      for (int k = 0; k < 3; ++k) ur[k] = (s.u[i + 1][k] - s.u[i - 1][k]) / (2 * h);
    }
    d.e[i] = 0.5 * (dot(s.v[i], s.v[i]) + dot(ur, ur) + centrifugal(s, c, i, s.u[i]));
    d.m[i] = dot(s.v[i], ur);
  }
  return d;
}

double energy(const FieldState& s) {
  const auto p = energy_parts(s);
  const double h = s.grid.h();
  double e = 0.0;
  for (double x : p.node) e += h * x;
  for (double x : p.cell) e += h * x;
  return e;
}

double charge(const FieldState& s) {
  const auto& c = coefficients(s);
  const double h = s.grid.h();
  double q = 0.0;
  for (int i = 1; i < s.grid.N; ++i) q += h * c.f_node[i] * dot(rotate_generator(s.u[i]), s.v[i]);
  return 2.0 * pi * q;
}

double rotation_defect(const FieldState& s, double omega) {
  const auto& c = coefficients(s);
  const double h = s.grid.h();
  double d = 0.0;
  for (int i = 1; i < s.grid.N; ++i) {
    const Vec3 au = rotate_generator(s.u[i]);
    const Vec3 w{s.v[i][0] - omega * au[0], s.v[i][1] - omega * au[1], s.v[i][2]};
    d += h * c.f_node[i] * dot(w, w);
  }
  return pi * d;
}

double gee_omega_state(const FieldState& s, double omega) {
  const auto& c = coefficients(s);
  const int N = s.grid.N;
  const double h = s.grid.h();
  double g = 0.0;
  for (int i = 1; i < N; ++i)
    g += h * pi * c.f_node[i] * (centrifugal(s, c, i, s.u[i]) - omega * omega * planar_sq(s.u[i]));
  for (int i = 0; i < N; ++i) {
    const Vec3 d = sub(s.u[i + 1], s.u[i]);
    g += pi * c.f_mid[i] * dot(d, d) / h;
  }
  return g;
}

double energy_identity_residual(const FieldState& s, double omega) {
  return std::abs(energy(s) - (gee_omega_state(s, omega) + omega * charge(s) + rotation_defect(s, omega)));
}

double local_energy(const FieldState& s, double radius) {
  if (radius <= 0.0) return 0.0;
  const auto p = energy_parts(s);
  const int N = s.grid.N;
  const double h = s.grid.h(), R = s.grid.R;
  double e = 0.0;
  for (int i = 1; i < N; ++i) e += p.node[i] * overlap(s.grid.r(i) - 0.5 * h, s.grid.r(i) + 0.5 * h, 0.0, radius);
  for (int i = 0; i < N; ++i) e += p.cell[i] * overlap(s.grid.r(i), s.grid.r(i + 1), 0.0, std::min(radius, R));
  return e;
}

ConeCheck cone_monotonicity_check(const FieldState& at_t1, const FieldState& at_t2, double radius, double tol) {
  require_same_grid(at_t1, at_t2);
  if (at_t2.t < at_t1.t) fail(ErrorCode::invalid_argument, "cone check needs T1 <= T2");
  ConeCheck out;
  const double inner = radius + at_t1.t - at_t2.t;
  if (inner <= 0.0) return out;
  out.e1 = local_energy(at_t1, radius);
  out.e2 = local_energy(at_t2, inner);
  out.violation = std::max(0.0, out.e2 - out.e1);
  out.holds = out.violation <= tol;
  return out;
}

CharacteristicFields characteristic_densities(const FieldState& s, double delta) {
  if (!(delta > 0.0 && delta < 0.5)) fail(ErrorCode::invalid_argument, "Hoelder exponent must lie in (0, 1/2)");
  const auto& c = coefficients(s);
  const int N = s.grid.N;
  const double h = s.grid.h();
  CharacteristicFields out;
  out.a.assign(N + 1, 0.0);
  out.b.assign(N + 1, 0.0);
  for (int i = 1; i < N; ++i) {
    Vec3 ur;
    for (int k = 0; k < 3; ++k) ur[k] = (s.u[i + 1][k] - s.u[i - 1][k]) / (2 * h);
    const double f = c.f_node[i];
    const double cen = centrifugal(s, c, i, s.u[i]);
    const Vec3 eta = add(s.v[i], ur), xi = sub(s.v[i], ur);
    out.a[i] = std::sqrt(0.5 * f * (dot(eta, eta) + cen));
    out.b[i] = std::sqrt(0.5 * f * (dot(xi, xi) + cen));
    out.X = std::max(out.X, std::pow(f, 0.5 - delta) * out.a[i]);
  }
  return out;
}

double flux_on_cone(const std::vector<FieldState>& snapshots, double t_tip) {
  std::vector<double> times;
  std::vector<std::vector<double>> g;
  for (const auto& s : snapshots) {
    if (!times.empty() && s.t < times.back()) fail(ErrorCode::invalid_argument, "snapshots are not time-ordered");
    times.push_back(s.t);
    g.push_back(cone_integrand(s));
  }
  if (snapshots.empty()) fail(ErrorCode::invalid_argument, "no snapshots recorded");
  return flux_from(times, g, snapshots.front().grid, t_tip);
}

std::optional<double> nonlinearity_ratio(const FieldState& s) {
  const auto& c = coefficients(s);
  const auto ch = characteristic_densities(s, 0.25);
  const double h = s.grid.h();
  std::optional<double> best;
  for (int i = 1; i < s.grid.N; ++i) {
    const double ab = ch.a[i] * ch.b[i];
    if (!(ab > 0.0)) continue;
    Vec3 ur;
    for (int k = 0; k < 3; ++k) ur[k] = (s.u[i + 1][k] - s.u[i - 1][k]) / (2 * h);
    const double q = dot(s.v[i], s.v[i]) - dot(ur, ur) - centrifugal(s, c, i, s.u[i]);
    const double ratio = std::abs(q) * c.f_node[i] / ab;
    best = best ? std::max(*best, ratio) : ratio;
  }
  return best;
}

namespace {

// Bilinear form of the H^1 x L^2 norm between (a.u, a.v) and (M b.u, M b.v).
template <class Map>
double pairing(const FieldState& a, const FieldState& b, Map&& M) {
  const auto& c = coefficients(a);
  const int N = a.grid.N;
  const double h = a.grid.h();
  const double l2 = static_cast<double>(a.l) * a.l;
  double sum = 0.0;
  for (int i = 0; i <= N; ++i) {
    const Vec3 bu = M(b.u[i]), bv = M(b.v[i]);
    double node = dot(a.u[i], bu) + dot(a.v[i], bv);
    if (i > 0 && i < N) {
      const double f = c.f_node[i];
      node += l2 * dot(rotate_generator(a.u[i]), rotate_generator(bu)) / (f * f);
    }
    sum += h * c.f_node[i] * node;
  }
  for (int i = 0; i < N; ++i) {
    const Vec3 da = sub(a.u[i + 1], a.u[i]);
    const Vec3 db = sub(M(b.u[i + 1]), M(b.u[i]));
    sum += c.f_mid[i] * dot(da, db) / h;
  }
  return 2.0 * pi * sum;
}

}  // namespace

double energy_norm_sq(const FieldState& a, const FieldState& b) {
  require_same_grid(a, b);
  FieldState d = a;
  for (std::size_t i = 0; i < d.u.size(); ++i) {
    d.u[i] = sub(a.u[i], b.u[i]);
    d.v[i] = sub(a.v[i], b.v[i]);
  }
  return pairing(d, d, [](const Vec3& x) { return x; });
}

OrbitDistance distance_to_orbit(const FieldState& s, const FieldState& reference) {
  require_same_grid(s, reference);
  const double P = -pairing(s, reference, [](const Vec3& x) { return Vec3{-x[0], -x[1], 0.0}; });
  const double Qt = pairing(s, reference, [](const Vec3& x) { return rotate_generator(x); });
  OrbitDistance out;
  out.tau = (P == 0.0 && Qt == 0.0) ? 0.0 : std::atan2(Qt, P);
  out.d = std::sqrt(std::max(0.0, energy_norm_sq(s, rotated(reference, out.tau))));
  return out;
}

OrbitDistance distance_to_orbit(const FieldState& s, const StationarySolution& sol, double omega) {
  return distance_to_orbit(s, state_from_stationary(sol, omega));
}

std::vector<DiagnosticsRecord> diagnostics_series(const std::vector<FieldState>& snapshots, double omega,
                                                  double delta_hoelder, const FieldState* reference) {
  std::vector<DiagnosticsRecord> out;
  std::vector<double> times;
  std::vector<std::vector<double>> g;
  double X = 0.0;
  for (const auto& s : snapshots) {
    if (!times.empty() && s.t < times.back()) fail(ErrorCode::invalid_argument, "snapshots are not time-ordered");
    times.push_back(s.t);
    g.push_back(cone_integrand(s));
    DiagnosticsRecord rec;
    rec.t = s.t;
    rec.E = energy(s);
    rec.Q = charge(s);
    rec.D = rotation_defect(s, omega);
    rec.G = gee_omega_state(s, omega);
    rec.identity_residual = std::abs(rec.E - (rec.G + omega * rec.Q + rec.D));
    X = std::max(X, characteristic_densities(s, delta_hoelder).X);
    rec.X = X;
    rec.flux = flux_from(times, g, s.grid, s.t);
    if (reference) rec.dist = distance_to_orbit(s, *reference).d;
    out.push_back(rec);
  }
  return out;
}

Drifts relative_drifts(const std::vector<DiagnosticsRecord>& series) {
  Drifts d;
  if (series.empty()) return d;
  const double E0 = series.front().E, Q0 = series.front().Q;
  const double escale = E0 > 0.0 ? E0 : 1.0;
  const double qscale = std::max(std::abs(Q0), escale);
  for (const auto& r : series) {
    d.energy = std::max(d.energy, std::abs(r.E - E0) / escale);
    d.charge = std::max(d.charge, std::abs(r.Q - Q0) / qscale);
  }
  return d;
}

StabilityResult stability_experiment(const StationarySolution& sol, double omega, const StabilityOptions& opts) {
  if (!(opts.delta >= 0.0) || !(opts.T > 0.0)) fail(ErrorCode::invalid_argument, "stability needs delta >= 0 and T > 0");
  const FieldState reference = state_from_stationary(sol, omega);
  const FieldState initial = perturb_state(reference, opts.delta, opts.shape, opts.seed);
  RunOptions ro = opts.run;
  ro.T = opts.T;
  StabilityResult res;
  res.run = run(initial, ro);
  res.series = diagnostics_series(res.run.snapshots, omega, opts.delta_hoelder, &reference);
  for (const auto& r : res.series) res.sup_dist = std::max(res.sup_dist, r.dist);
  res.drifts = relative_drifts(res.series);
  res.stable = !res.run.aborted && res.sup_dist <= opts.epsilon;
  return res;
}

}  // namespace ewm
