#pragma once

#include <array>
#include <span>
#include <vector>

#include "ewm/profile.hpp"
#include "ewm/stationary.hpp"

namespace ewm {

/// c_l(r) = ((1 - f'^2) + 2l(f' - 1) + f f'') / f^2, evaluated without cancellation.
double rhs_coefficient(const SurfaceProfile& p, int l, double r);

/// Bump sin^8 supported on [a, b], zero elsewhere.
std::vector<double> bump_test_function(const Grid& grid, double a, double b);

/// Pointwise T_l L_l psi - L_{l-1} T_l psi - c_l T_l psi with central stencils.
/// Entries within two nodes of a pole are zero; psi must vanish there.
std::vector<double> intertwining_residual(const SurfaceProfile& p, int l, const Grid& grid, std::span<const double> psi);

struct IntertwiningStudy {
  std::vector<int> N;
  std::vector<double> residual;  ///< max-norm per grid
  double rate = 0.0;             ///< least-squares slope of log residual against log h
};
/// Runs the residual on the sin^8 bump over [R/4, 3R/4] for each grid size.
IntertwiningStudy intertwining_study(const SurfaceProfile& p, int l, std::vector<int> Ns = {200, 400, 800});

/// w = v_r + l v / f. The pole values are limits; v(0) must vanish.
std::vector<double> w_transform(const SurfaceProfile& p, const Grid& grid, std::span<const double> v, int l);
/// v = exp(-l s(r)) int_0^r exp(l s) w, s the arclength coordinate; trapezoid on the grid.
std::vector<double> inverse_w_transform(const SurfaceProfile& p, const Grid& grid, std::span<const double> w, int l);

using Mat2 = std::array<std::array<double, 2>, 2>;

struct ChartMetric {
  Mat2 g;
  Mat2 g_inv;
};
/// Hemisphere graph chart: g = [[1-y^2, xy], [xy, 1-x^2]] / (1 - x^2 - y^2).
ChartMetric metric_chart(double x, double y);
/// d[k][i][j] = d_k g_ij.
std::array<Mat2, 2> metric_derivative(double x, double y);
/// gamma[m][i][j] = Gamma^m_ij.
std::array<Mat2, 2> christoffel(double x, double y);
/// max over a polar sample of |X| <= rho of |Gamma(X)| / |X| (Frobenius norm).
double christoffel_linear_constant(double rho, int radial = 50, int angular = 97);

}  // namespace ewm
