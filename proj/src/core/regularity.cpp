#include "ewm/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ewm/error.hpp"

namespace ewm {

namespace {

constexpr double pi = std::numbers::pi;

void check_l(int l) {
  if (l < 0) fail(ErrorCode::invalid_argument, "rotation number must be non-negative");
}

void check_size(const Grid& grid, std::size_t n) {
  if (n != static_cast<std::size_t>(grid.N) + 1) fail(ErrorCode::invalid_argument, "grid function size mismatch");
}

}  // namespace

double rhs_coefficient(const SurfaceProfile& p, int l, double r) {
  check_l(l);
  const Jet j = p.eval(r);
  if (!(j.f > 0.0)) fail(ErrorCode::domain, "rhs coefficient is evaluated in the open interval only");
  return (j.one_minus_fp2 + 2.0 * l * j.fp_minus_one + j.f * j.fpp) / (j.f * j.f);
}

std::vector<double> bump_test_function(const Grid& grid, double a, double b) {
  std::vector<double> psi(grid.N + 1, 0.0);
  for (int i = 0; i <= grid.N; ++i) {
    const double r = grid.r(i);
    if (r > a && r < b) psi[i] = std::pow(std::sin(pi * (r - a) / (b - a)), 8);
  }
  return psi;
}

std::vector<double> intertwining_residual(const SurfaceProfile& p, int l, const Grid& grid, std::span<const double> psi) {
  check_l(l);
  check_size(grid, psi.size());
  const int N = grid.N;
  const double h = grid.h();
  std::vector<double> f(N + 1), fp(N + 1), c(N + 1, 0.0);
  for (int i = 1; i < N; ++i) {
    const Jet j = p.eval(grid.r(i));
    f[i] = j.f;
    fp[i] = j.fp;
    c[i] = rhs_coefficient(p, l, grid.r(i));
  }
  auto d1 = [&](const std::vector<double>& x, int i) { return (x[i + 1] - x[i - 1]) / (2 * h); };
  auto d2 = [&](const std::vector<double>& x, int i) { return (x[i + 1] - 2 * x[i] + x[i - 1]) / (h * h); };
  const std::vector<double> x(psi.begin(), psi.end());
  std::vector<double> Lx(N + 1, 0.0), Tx(N + 1, 0.0);
  const double l2 = static_cast<double>(l) * l, lm2 = static_cast<double>(l - 1) * (l - 1);
  for (int i = 1; i < N; ++i) {
    Lx[i] = d2(x, i) + fp[i] / f[i] * d1(x, i) - l2 / (f[i] * f[i]) * x[i];
    Tx[i] = d1(x, i) + l / f[i] * x[i];
  }
  std::vector<double> res(N + 1, 0.0);
  for (int i = 2; i <= N - 2; ++i) {
    const double TL = d1(Lx, i) + l / f[i] * Lx[i];
    const double LT = d2(Tx, i) + fp[i] / f[i] * d1(Tx, i) - lm2 / (f[i] * f[i]) * Tx[i];
    res[i] = TL - LT - c[i] * Tx[i];
  }
  return res;
}

IntertwiningStudy intertwining_study(const SurfaceProfile& p, int l, std::vector<int> Ns) {
  if (Ns.size() < 2) fail(ErrorCode::invalid_argument, "a convergence study needs at least two grids");
  IntertwiningStudy st;
  st.N = std::move(Ns);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int n : st.N) {
    const Grid grid(p.R(), n);
    const auto psi = bump_test_function(grid, 0.25 * p.R(), 0.75 * p.R());
    const auto res = intertwining_residual(p, l, grid, psi);
    double m = 0.0;
    for (double v : res) m = std::max(m, std::abs(v));
    st.residual.push_back(m);
    const double lx = std::log(grid.h()), ly = std::log(m);
    sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
  }
  const double k = static_cast<double>(st.N.size());
  st.rate = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  return st;
}

std::vector<double> w_transform(const SurfaceProfile& p, const Grid& grid, std::span<const double> v, int l) {
  check_l(l);
  check_size(grid, v.size());
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  if (std::abs(v[0]) > 1e-14 * std::max(scale, 1e-300)) {
    std::ostringstream os;
    os << "w-transform needs v(0) = 0, got " << v[0];
    fail(ErrorCode::domain, os.str());
  }
  const int N = grid.N;
  const double h = grid.h();
  std::vector<double> w(N + 1, 0.0);
  for (int i = 1; i < N; ++i) w[i] = (v[i + 1] - v[i - 1]) / (2 * h) + l * v[i] / p.eval(grid.r(i)).f;
  // v ~ a r^l gives w ~ 2 l a r^(l-1).
  const double vr0 = (-3 * v[0] + 4 * v[1] - v[2]) / (2 * h);
  w[0] = l == 0 ? vr0 : (l == 1 ? 2 * vr0 : 0.0);
  w[N] = 2 * w[N - 1] - w[N - 2];
  return w;
}

std::vector<double> inverse_w_transform(const SurfaceProfile& p, const Grid& grid, std::span<const double> w, int l) {
  check_l(l);
  check_size(grid, w.size());
  const int N = grid.N;
  const double h = grid.h();
  std::vector<double> s(N, 0.0);
  for (int i = 1; i < N; ++i) s[i] = arclength_coordinate(p, grid.r(i));
  std::vector<double> v(N + 1, 0.0);
  // Running value of int_0^{r_i} exp(l (s - s_i)) w, rescaled node by node.
  double acc = 0.0;
  for (int i = 1; i < N; ++i) {
    const double q = i == 1 ? (l == 0 ? 1.0 : 0.0) : std::exp(l * (s[i - 1] - s[i]));
    acc = q * acc + 0.5 * h * (q * w[i - 1] + w[i]);
    v[i] = acc;
  }
  v[N] = 2 * v[N - 1] - v[N - 2];
  return v;
}

ChartMetric metric_chart(double x, double y) {
  const double D = 1.0 - x * x - y * y;
  if (!(D > 0.0)) fail(ErrorCode::domain, "chart point outside the unit disc");
  ChartMetric m;
  m.g = {{{(1 - y * y) / D, x * y / D}, {x * y / D, (1 - x * x) / D}}};
  m.g_inv = {{{1 - x * x, -x * y}, {-x * y, 1 - y * y}}};
  return m;
}

std::array<Mat2, 2> metric_derivative(double x, double y) {
  const double D = 1.0 - x * x - y * y;
  if (!(D > 0.0)) fail(ErrorCode::domain, "chart point outside the unit disc");
  const Mat2 M{{{1 - y * y, x * y}, {x * y, 1 - x * x}}};
  const std::array<Mat2, 2> dM{Mat2{{{0.0, y}, {y, -2 * x}}}, Mat2{{{-2 * y, x}, {x, 0.0}}}};
  const double X[2] = {x, y};
  std::array<Mat2, 2> d{};
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) d[k][i][j] = dM[k][i][j] / D + M[i][j] * 2 * X[k] / (D * D);
  return d;
}

std::array<Mat2, 2> christoffel(double x, double y) {
  const auto gi = metric_chart(x, y).g_inv;
  const auto d = metric_derivative(x, y);
  std::array<Mat2, 2> G{};
  for (int m = 0; m < 2; ++m)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        double s = 0.0;
        for (int k = 0; k < 2; ++k) s += gi[m][k] * (d[i][k][j] + d[j][k][i] - d[k][i][j]);
        G[m][i][j] = 0.5 * s;
      }
  return G;
}

double christoffel_linear_constant(double rho, int radial, int angular) {
  if (!(rho > 0.0 && rho < 1.0) || radial < 2 || angular < 2)
    fail(ErrorCode::invalid_argument, "christoffel sampling needs 0 < rho < 1");
  double best = 0.0;
  for (int a = 0; a < radial; ++a) {
    const double rad = rho / radial + (rho - rho / radial) * a / (radial - 1);
    for (int b = 0; b < angular; ++b) {
      const double ang = 2 * pi * b / (angular - 1);
      const double x = rad * std::cos(ang), y = rad * std::sin(ang);
      const auto G = christoffel(x, y);
      double n = 0.0;
      for (const auto& M : G)
        for (const auto& row : M)
          for (double v : row) n += v * v;
      best = std::max(best, std::sqrt(n) / std::hypot(x, y));
    }
  }
  return best;
}

}  // namespace ewm
