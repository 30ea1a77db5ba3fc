#include "ewm/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "ewm/error.hpp"

namespace ewm {

Grid::Grid(double R_, int N_) : R(R_), N(N_) {
  if (!(R_ > 0.0) || N_ < 16) fail(ErrorCode::invalid_argument, "grid needs R > 0 and N >= 16");
}

std::vector<double> Grid::nodes() const {
  std::vector<double> r(N + 1);
  for (int i = 0; i <= N; ++i) r[i] = this->r(i);
  return r;
}

namespace {

constexpr double pi = std::numbers::pi;

// Per-grid coefficients shared by the action, its derivatives and the residual.
// Gradient term: midpoint rule per cell. Potential term: nodal rule; the pole nodes carry
// g(phi) = 0, so l^2 g^2 / f is never evaluated at f = 0.
struct Discretization {
  Grid grid;
  std::vector<double> f_node;
  std::vector<double> f_mid;

  Discretization(const SurfaceProfile& s, int N) : grid(s.R(), N), f_node(N + 1), f_mid(N) {
    const double h = grid.h();
    for (int i = 0; i <= N; ++i) f_node[i] = s.eval(grid.r(i)).f;
    for (int c = 0; c < N; ++c) f_mid[c] = s.eval(std::min(s.R(), (c + 0.5) * h)).f;
  }

  double potential_weight(int i, int l, double omega) const {
    const double f = f_node[i];
    return l * l / f - omega * omega * f;
  }
};

void check_phi(const SurfaceProfile& s, const TargetProfile& t, std::span<const double> phi) {
  if (phi.size() < 17) fail(ErrorCode::invalid_argument, "phi needs at least 17 nodes");
  for (double v : phi)
    if (!std::isfinite(v)) fail(ErrorCode::invalid_argument, "phi contains non-finite values");
  (void)s;
  const double tol = 1e-12;
  if (std::abs(t.g(phi.front())) > tol || std::abs(t.g(phi.back())) > tol) {
    std::ostringstream os;
    os << "phi violates pole decay: g(phi(0)) = " << t.g(phi.front()) << ", g(phi(R)) = " << t.g(phi.back())
       << "; the l^2 g^2 / f^2 integrand is not integrable";
    fail(ErrorCode::domain, os.str());
  }
}

double action_impl(const Discretization& D, const TargetProfile& t, std::span<const double> phi, int l,
                   double omega) {
  const int N = D.grid.N;
  const double h = D.grid.h();
  double kin = 0.0, pot = 0.0;
  for (int c = 0; c < N; ++c) {
    const double dphi = phi[c + 1] - phi[c];
    kin += D.f_mid[c] * dphi * dphi / h;
  }
  for (int i = 1; i < N; ++i) {
    const double g = t.g(phi[i]);
    pot += h * D.potential_weight(i, l, omega) * g * g;
  }
  return pi * (kin + pot);
}

std::vector<double> gradient_impl(const Discretization& D, const TargetProfile& t, std::span<const double> phi,
                                  int l, double omega) {
  const int N = D.grid.N;
  const double h = D.grid.h();
  std::vector<double> grad(N + 1, 0.0);
  for (int c = 0; c < N; ++c) {
    const double kin = 2.0 * pi * D.f_mid[c] * (phi[c + 1] - phi[c]) / h;
    grad[c] -= kin;
    grad[c + 1] += kin;
  }
  for (int i = 1; i < N; ++i) grad[i] += 2.0 * pi * h * D.potential_weight(i, l, omega) * t.g(phi[i]) * t.gp(phi[i]);
  grad[0] = grad[N] = 0.0;
  return grad;
}

// Tridiagonal Hessian: diag[i], off[i] couples i and i+1.
void hessian_impl(const Discretization& D, const TargetProfile& t, std::span<const double> phi, int l, double omega,
                  std::vector<double>& diag, std::vector<double>& off) {
  const int N = D.grid.N;
  const double h = D.grid.h();
  diag.assign(N + 1, 0.0);
  off.assign(N, 0.0);
  for (int c = 0; c < N; ++c) {
    const double kin = 2.0 * pi * D.f_mid[c] / h;
    diag[c] += kin;
    diag[c + 1] += kin;
    off[c] -= kin;
  }
  for (int i = 1; i < N; ++i) {
    const double gp = t.gp(phi[i]);
    diag[i] += 2.0 * pi * h * D.potential_weight(i, l, omega) * (gp * gp + t.g(phi[i]) * t.gpp(phi[i]));
  }
}

// Solves the interior block (nodes 1..N-1) of (diag + shift) x = rhs; false if a pivot is not positive.
bool thomas_spd(const std::vector<double>& diag, const std::vector<double>& off, double shift,
                const std::vector<double>& rhs, std::vector<double>& x) {
  const int N = static_cast<int>(diag.size()) - 1;
  std::vector<double> c(N + 1, 0.0), d(N + 1, 0.0);
  x.assign(N + 1, 0.0);
  double prev_c = 0.0, prev_d = 0.0;
  for (int i = 1; i < N; ++i) {
    const double lower = i > 1 ? off[i - 1] : 0.0;
    const double piv = diag[i] + shift - lower * prev_c;
    if (!(piv > 0.0)) return false;
    c[i] = i < N - 1 ? off[i] / piv : 0.0;
    d[i] = (rhs[i] - lower * prev_d) / piv;
    prev_c = c[i];
    prev_d = d[i];
  }
  for (int i = N - 1; i >= 1; --i) x[i] = d[i] - (i < N - 1 ? c[i] * x[i + 1] : 0.0);
  return true;
}

std::vector<double> residual_impl(const Discretization& D, const std::vector<double>& grad) {
  const int N = D.grid.N;
  const double h = D.grid.h();
  std::vector<double> res(N + 1, 0.0);
  for (int i = 1; i < N; ++i) res[i] = -grad[i] / (2.0 * pi * h * D.f_node[i]);
  return res;
}

double residual_norm_impl(const Discretization& D, const std::vector<double>& res) {
  const double h = D.grid.h();
  double s = 0.0;
  for (std::size_t i = 1; i + 1 < res.size(); ++i) s += h * std::abs(D.f_node[i]) * res[i] * res[i];
  return std::sqrt(s);
}

[[noreturn]] void nan_abort(int iter, double action, std::span<const double> phi) {
  std::ostringstream os;
  os << "NaN in line search at iteration " << iter << " (last action " << action << "); state:";
  const std::size_t n = phi.size();
  for (std::size_t i = 0; i < n; i += std::max<std::size_t>(1, n / 8)) os << " phi[" << i << "]=" << phi[i];
  fail(ErrorCode::not_converged, os.str());
}

StationarySolution solve_once(const Discretization& D, const SurfaceProfile& s, const TargetProfile& t, int l,
                              double omega, std::vector<double> phi, const StationaryOptions& opts) {
  const int N = D.grid.N;
  const double H = t.H();
  auto project = [&](std::vector<double>& v) {
    v[0] = 0.0;
    v[N] = H;
    for (int i = 1; i < N; ++i) v[i] = std::clamp(v[i], 0.0, H);
  };
  project(phi);

  StationarySolution sol;
  sol.surface = s;
  sol.target = t;
  sol.grid = D.grid;
  sol.l = l;
  sol.omega = omega;

  double A = action_impl(D, t, phi, l, omega);
  if (!std::isfinite(A)) nan_abort(0, A, phi);
  sol.action_history.push_back(A);
  std::vector<double> grad = gradient_impl(D, t, phi, l, omega);
  double rnorm = residual_norm_impl(D, residual_impl(D, grad));
  std::vector<double> diag, off, step, trial(N + 1);

  int iter = 0;
  int stalled = 0;
  for (; iter < opts.max_iter && rnorm > opts.tol && stalled < 5; ++iter) {
    const bool newton = opts.newton_polish && iter >= opts.descent_iter;
    hessian_impl(D, t, phi, l, omega, diag, off);
    std::vector<double> rhs(N + 1);
    for (int i = 0; i <= N; ++i) rhs[i] = -grad[i];
    if (newton) {
      double dmax = 0.0;
      for (int i = 1; i < N; ++i) dmax = std::max(dmax, std::abs(diag[i]));
      double shift = 0.0;
      while (!thomas_spd(diag, off, shift, rhs, step)) shift = shift == 0.0 ? 1e-10 * dmax : 10.0 * shift;
    } else {
      // Diagonally scaled gradient step.
      step.assign(N + 1, 0.0);
      for (int i = 1; i < N; ++i) step[i] = rhs[i] / std::max(std::abs(diag[i]), 1e-300);
    }
    double slope = 0.0;
    for (int i = 1; i < N; ++i) slope += grad[i] * step[i];
    double tstep = 1.0;
    bool accepted = false;
    double Anew = A;
    for (int ls = 0; ls < 60; ++ls) {
      for (int i = 0; i <= N; ++i) trial[i] = phi[i] + tstep * step[i];
      project(trial);
      Anew = action_impl(D, t, trial, l, omega);
      if (!std::isfinite(Anew)) nan_abort(iter, A, phi);
      if (Anew <= A + 1e-4 * tstep * std::min(slope, 0.0)) {
        accepted = true;
        break;
      }
      tstep *= 0.5;
    }
    if (!accepted) break;
    phi.swap(trial);
    const bool lowered = Anew < A;
    const double prev = rnorm;
    A = Anew;
    sol.action_history.push_back(A);
    grad = gradient_impl(D, t, phi, l, omega);
    rnorm = residual_norm_impl(D, residual_impl(D, grad));
    // At the rounding floor neither the action nor the residual moves any more.
    stalled = lowered || rnorm < 0.5 * prev ? 0 : stalled + 1;
  }

  sol.phi = std::move(phi);
  sol.action = A;
  sol.iterations = iter;
  sol.residual_norm = rnorm;
  double gn = 0.0;
  for (double g : grad) gn += g * g;
  sol.gradient_norm = std::sqrt(gn);
  sol.converged = rnorm <= opts.tol;
  sol.el_residual_norm = el_residual_norm(s, el_residual(s, t, sol.phi, l, omega));
  return sol;
}

}  // namespace

double reduced_action(const SurfaceProfile& s, const TargetProfile& t, std::span<const double> phi, int l,
                      double omega) {
  check_phi(s, t, phi);
  const Discretization D(s, static_cast<int>(phi.size()) - 1);
  return action_impl(D, t, phi, l, omega);
}

std::vector<double> reduced_action_gradient(const SurfaceProfile& s, const TargetProfile& t,
                                            std::span<const double> phi, int l, double omega) {
  check_phi(s, t, phi);
  const Discretization D(s, static_cast<int>(phi.size()) - 1);
  return gradient_impl(D, t, phi, l, omega);
}

std::vector<double> stationarity_residual(const SurfaceProfile& s, const TargetProfile& t,
                                          std::span<const double> phi, int l, double omega) {
  check_phi(s, t, phi);
  const Discretization D(s, static_cast<int>(phi.size()) - 1);
  return residual_impl(D, gradient_impl(D, t, phi, l, omega));
}

std::vector<double> el_residual(const SurfaceProfile& s, const TargetProfile& t, std::span<const double> phi, int l,
                                double omega) {
  check_phi(s, t, phi);
  const Grid grid(s.R(), static_cast<int>(phi.size()) - 1);
  const double h = grid.h();
  std::vector<double> res(phi.size(), 0.0);
  for (int i = 1; i < grid.N; ++i) {
    const Jet j = s.eval(grid.r(i));
    const double d2 = (phi[i + 1] - 2.0 * phi[i] + phi[i - 1]) / (h * h);
    const double d1 = (phi[i + 1] - phi[i - 1]) / (2.0 * h);
    res[i] = d2 + j.fp / j.f * d1 + (omega * omega - l * l / (j.f * j.f)) * t.g(phi[i]) * t.gp(phi[i]);
  }
  return res;
}

double el_residual_norm(const SurfaceProfile& s, std::span<const double> residual) {
  if (residual.size() < 17) fail(ErrorCode::invalid_argument, "residual needs at least 17 nodes");
  const Grid grid(s.R(), static_cast<int>(residual.size()) - 1);
  double sum = 0.0;
  for (int i = 1; i < grid.N; ++i) sum += grid.h() * std::abs(s.eval(grid.r(i)).f) * residual[i] * residual[i];
  return std::sqrt(sum);
}

std::vector<double> default_initial_guess(const Grid& grid, double H) {
  std::vector<double> phi(grid.N + 1);
  for (int i = 0; i <= grid.N; ++i) phi[i] = 0.5 * H * (1.0 - std::cos(pi * i / grid.N));
  phi[grid.N] = H;
  return phi;
}

StationarySolution solve_stationary(const SurfaceProfile& s, const TargetProfile& t, int l, double omega, int N,
                                    const std::vector<double>* init, const StationaryOptions& opts) {
  if (l < 1) fail(ErrorCode::invalid_argument, "rotation number l must be >= 1");
  if (!std::isfinite(omega)) fail(ErrorCode::invalid_argument, "omega must be finite");
  if (!(opts.tol > 0.0) || opts.max_iter < 1) fail(ErrorCode::invalid_argument, "solver needs tol > 0, max_iter >= 1");
  const Discretization D(s, N);
  std::vector<double> phi0 = init ? *init : default_initial_guess(D.grid, t.H());
  if (static_cast<int>(phi0.size()) != N + 1) fail(ErrorCode::invalid_argument, "initial guess has the wrong size");
  if (std::abs(phi0.front()) > 1e-12 || std::abs(phi0.back() - t.H()) > 1e-12)
    fail(ErrorCode::invalid_argument, "initial guess must satisfy phi(0) = 0, phi(R) = H");

  StationarySolution best = solve_once(D, s, t, l, omega, phi0, opts);
  best.multistart_actions.push_back(best.action);
  if (opts.multistart) {
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    for (int k = 0; k < 3; ++k) {
      std::vector<double> phi = phi0;
      const double a1 = coef(rng), a2 = coef(rng), a3 = coef(rng);
      for (int i = 1; i < N; ++i) {
        const double x = pi * i / N;
        phi[i] += 0.1 * t.H() * (a1 * std::sin(x) + a2 * std::sin(2 * x) + a3 * std::sin(3 * x));
      }
      StationarySolution cand = solve_once(D, s, t, l, omega, phi, opts);
      best.multistart_actions.push_back(cand.action);
      const bool better = (cand.converged && !best.converged) ||
                          (cand.converged == best.converged && cand.action < best.action);
      if (better) {
        auto history = std::move(best.multistart_actions);
        best = std::move(cand);
        best.multistart_actions = std::move(history);
      }
    }
  }
  try {
    best.exponents = boundary_exponent_fit(best);
  } catch (const Error&) {
    best.exponents = {NAN, NAN, NAN, NAN};
  }
  return best;
}

int degree_of(const TargetProfile& t, double phi_left, double phi_right, int l) {
  const double H = t.H();
  const double tol = 1e-9 * std::max(1.0, H);
  auto pole = [&](double v) { return std::abs(v) <= tol || std::abs(v - H) <= tol; };
  if (!pole(phi_left) || !pole(phi_right)) fail(ErrorCode::domain, "degree needs endpoint values in {0, H}");
  const double deg = 2.0 * pi * l * (t.G(phi_right) - t.G(phi_left)) / t.vol();
  return static_cast<int>(std::lround(deg));
}

double gee_omega(const SurfaceProfile& s, const TargetProfile& t, std::span<const double> phi,
                 std::span<const double> zeta, int l, double omega) {
  check_phi(s, t, phi);
  if (zeta.size() != phi.size()) fail(ErrorCode::invalid_argument, "zeta and phi must share the grid");
  const Discretization D(s, static_cast<int>(phi.size()) - 1);
  const double h = D.grid.h();
  double extra = 0.0;
  for (int c = 0; c < D.grid.N; ++c) {
    const double dz = zeta[c + 1] - zeta[c];
    const double g = t.g(0.5 * (phi[c] + phi[c + 1]));
    extra += D.f_mid[c] * dz * dz / h * g * g;
  }
  return action_impl(D, t, phi, l, omega) + pi * extra;
}

namespace {

void fit_log(const std::vector<double>& x, const std::vector<double>& y, double& a, double& p) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  p = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  a = std::exp((sy - p * sx) / n);
}

}  // namespace

BoundaryExponents boundary_exponent_fit(const Grid& grid, std::span<const double> phi, double H) {
  constexpr int count = 10;
  if (static_cast<int>(phi.size()) != grid.N + 1 || grid.N < 2 * count + 2)
    fail(ErrorCode::invalid_argument, "exponent fit needs phi on a grid with at least 22 cells");
  std::vector<double> xl, yl, xr, yr;
  for (int i = 1; i <= count; ++i) {
    const double left = phi[i];
    const double right = H - phi[grid.N - i];
    if (!(left > 0.0) || !(right > 0.0))
      fail(ErrorCode::domain, "insufficient dynamic range: phi must be strictly inside (0, H) near the poles");
    xl.push_back(std::log(grid.r(i)));
    yl.push_back(std::log(left));
    xr.push_back(std::log(grid.R - grid.r(grid.N - i)));
    yr.push_back(std::log(right));
  }
  BoundaryExponents e;
  fit_log(xl, yl, e.a_left, e.p_left);
  fit_log(xr, yr, e.a_right, e.p_right);
  return e;
}

BoundaryExponents boundary_exponent_fit(const StationarySolution& sol) {
  return boundary_exponent_fit(sol.grid, sol.phi, sol.target.H());
}

}  // namespace ewm
