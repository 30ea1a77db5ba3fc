#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ewm/error.hpp"
#include "ewm/geodesic.hpp"

using namespace ewm;
using std::numbers::pi;

namespace {

// Spherical law of cosines on the unit sphere.
double round_distance(double r, double rp, double th) {
  return std::acos(std::cos(r) * std::cos(rp) + std::sin(r) * std::sin(rp) * std::cos(th));
}

}  // namespace

TEST_CASE("geodesic_trace: meridian and equator") {
  const auto p = SurfaceProfile::round();
  const auto meridian = geodesic_trace(p, 0.5, 0.3, 0.0, 1.0);
  CHECK_FALSE(meridian.hit_pole);
  CHECK(meridian.points.back().r == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(meridian.points.back().theta == doctest::Approx(0.3).epsilon(1e-14));

  const auto equator = geodesic_trace(p, pi / 2, 0.0, pi / 2, 1.0);
  for (const auto& q : equator.points) CHECK(q.r == doctest::Approx(pi / 2).epsilon(1e-12));
  CHECK(equator.points.back().theta == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("geodesic_trace: Clairaut invariant on bumpy") {
  const auto p = SurfaceProfile::bumpy(0.05);
  const auto path = geodesic_trace(p, 0.8, 0.0, 1.1, 1.0, 1e-4);
  CHECK_FALSE(path.hit_pole);
  CHECK(path.clairaut_drift < 1e-8);
  CHECK(path.speed_error < 1e-8);
}

TEST_CASE("geodesic_trace reports pole crossings") {
  const auto path = geodesic_trace(SurfaceProfile::round(), 0.3, 0.0, pi, 1.0);
  CHECK(path.hit_pole);
  CHECK(path.pole_arclength == doctest::Approx(0.3).epsilon(1e-3));
}

TEST_CASE("geodesic_distance: meridian segment") {
  const auto p = SurfaceProfile::bumpy(0.05);
  auto t = geodesic_distance(p, 0.2, 0.5, 0.0);
  CHECK(t.d == doctest::Approx(0.3));
  CHECK(t.alpha == 0.0);
  t = geodesic_distance(p, 0.5, 0.2, 0.0);
  CHECK(t.alpha == doctest::Approx(pi));
}

TEST_CASE("geodesic_distance: spherical law of cosines") {
  const auto p = SurfaceProfile::round();
  const auto t = geodesic_distance(p, 0.2, 0.3, pi / 2);
  CHECK(t.d == doctest::Approx(0.3588726546765412).epsilon(1e-10));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> rad(0.05, 2.5), ang(0.05, 3.0);
  for (int i = 0; i < 20; ++i) {
    const double r = rad(rng), rp = rad(rng), th = ang(rng);
    CHECK(std::abs(geodesic_distance(p, r, rp, th).d - round_distance(r, rp, th)) < 1e-9);
  }
}

TEST_CASE("geodesic_distance is symmetric in r and r'") {
  const auto p = SurfaceProfile::bumpy(0.05);
  for (auto [r, rp, th] : {std::tuple{0.2, 0.45, 0.7}, {0.6, 0.1, 1.9}, {0.3, 0.3, 2.8}})
    CHECK(std::abs(geodesic_distance(p, r, rp, th).d - geodesic_distance(p, rp, r, th).d) < 1e-10);
}

TEST_CASE("comparison distances and angles") {
  const auto cd = comparison_distances(0.3, 0.4, pi / 3, 1e-6);
  CHECK(cd.d0 == doctest::Approx(std::sqrt(0.13)).epsilon(1e-14));
  CHECK(std::abs(cd.dK - cd.d0) < 1e-6);
  CHECK_THROWS_AS(comparison_distances(3.5, 0.1, 1.0, 1.0), Error);

  const auto ca = comparison_angles(0.3, 0.4, 0.5, 1.0);
  CHECK(std::cos(ca.alpha0) == doctest::Approx(0.8).epsilon(1e-14));
  const auto deg = comparison_angles(0.3, 0.4, 0.7, 1.0);
  CHECK(deg.degenerate);
  CHECK(deg.alpha0 == doctest::Approx(0.0));
  const auto small = comparison_angles(0.003, 0.004, 0.005, 1.0);
  CHECK(std::abs(small.alphaK - small.alpha0) < 1e-4);
  CHECK_THROWS_AS(comparison_angles(0.1, 0.1, 0.5, 1.0), Error);
}

TEST_CASE("comparison bracket on bumpy triangles near the pole") {
  const auto p = SurfaceProfile::bumpy(0.05);
  const double K = 1.05 * max_curvature(p, 0.0, p.R());
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> rad(0.02, 0.5), ang(0.02, 3.1);
  for (int i = 0; i < 40; ++i) {
    auto t = geodesic_distance(p, rad(rng), rad(rng), ang(rng));
    attach_comparison(t, K);
    CHECK(t.dK <= t.d + 1e-12);
    CHECK(t.d <= t.d0 + 1e-12);
  }
}

TEST_CASE("eikonal residual") {
  // meridian: y = (r - r')^2, zero up to rounding in the difference quotient
  CHECK(eikonal_residual(SurfaceProfile::bumpy(0.05), 0.3, 0.5, 0.0, 1e-4) < 1e-12);
  CHECK(eikonal_residual(SurfaceProfile::round(), 0.4, 0.6, 1.1, 1e-4) < 1e-6);
  const auto p = SurfaceProfile::bumpy(0.05);
  const double e1 = eikonal_residual(p, 0.4, 0.6, 1.1, 2e-2);
  const double e2 = eikonal_residual(p, 0.4, 0.6, 1.1, 1e-2);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("angle identities on the round octant") {
  const auto p = SurfaceProfile::round();
  const auto t = geodesic_distance(p, pi / 2, pi / 2, pi / 2);
  CHECK(t.alpha == doctest::Approx(pi / 2).epsilon(1e-10));
  CHECK(t.beta == doctest::Approx(pi / 2).epsilon(1e-10));
  CHECK(t.curvature_integral == doctest::Approx(pi / 2).epsilon(1e-10));
  const auto rep = angle_identities_check(p, t);
  CHECK(rep.gauss_bonnet_residual < 1e-6);
}

TEST_CASE("angle identities on round samples") {
  const auto p = SurfaceProfile::round();
  for (auto [r, rp, th] : {std::tuple{0.2, 0.35, 0.9}, {0.45, 0.15, 2.0}, {0.3, 0.3, 0.4}}) {
    const auto t = geodesic_distance(p, r, rp, th);
    const auto rep = angle_identities_check(p, t);
    CHECK(rep.dy_drp_relerr < 1e-4);
    CHECK(rep.eikonal_relerr < 1e-4);
    CHECK(rep.remark7_residual < 1e-9);
    CHECK(rep.gauss_bonnet_residual < 1e-9);
    // dense-sampling oracle over r, r' in [0.05, 0.5]: m r r' in [0.458, 0.544]
    CHECK(rep.ratio_m_min >= 0.45);
    CHECK(rep.ratio_m_max <= 0.55);
    CHECK(rep.alpha_r_bracketed);
  }
}

TEST_CASE("lightcone kernel") {
  const auto flat = SurfaceProfile::flat(1.0);
  CHECK(lightcone_kernel_integral(flat, 0.2, 0.3, 0.05) == 0.0);
  // flat limit s -> |r - r'|: pi sqrt(r'/r)
  for (auto [r, rp] : {std::pair{0.1, 0.05}, {0.1, 0.3}, {0.2, 0.2 + 1e-3}}) {
    const double s = std::abs(r - rp) * (1 + 1e-7) + 1e-9;
    const double v = lightcone_kernel_integral(flat, r, rp, s);
    CHECK(v / std::sqrt(rp / r) == doctest::Approx(pi).epsilon(2e-3));
  }
  // mpmath quadrature of the round-sphere closed form (tests/oracles/oracles.py)
  const auto round = SurfaceProfile::round();
  CHECK(lightcone_kernel_integral(round, 0.1, 0.3, 0.20001) == doctest::Approx(5.387154858430310).epsilon(1e-6));
  CHECK(lightcone_kernel_integral(round, 0.3, 0.1, 0.20003) == doctest::Approx(1.819932611359405).epsilon(1e-6));
  CHECK(lightcone_kernel_integral(round, 0.2, 0.25, 0.3) == doctest::Approx(4.010803232066381).epsilon(1e-6));
  CHECK(lightcone_kernel_integral(round, 0.4, 0.4, 0.5) == doctest::Approx(3.503483958702276).epsilon(1e-6));
}

TEST_CASE("lightcone kernel: quadrupling r' doubles the limiting value") {
  // mpmath oracle on the unit sphere: ratio 2.0000004 at s = |r - r'| (1 + 1e-5)
  const auto round = SurfaceProfile::round();
  for (double r : {0.05, 0.2}) {
    const double a = lightcone_kernel_integral(round, r, r / 5, (r - r / 5) * (1 + 1e-5));
    const double b = lightcone_kernel_integral(round, r, 4 * r / 5, (r - 4 * r / 5) * (1 + 1e-5));
    CHECK(b / a == doctest::Approx(2.0).epsilon(1e-4));
  }
}
