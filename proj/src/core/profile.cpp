#include "ewm/profile.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

// Boost 1.74 pchip calls isnan unqualified.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ewm/error.hpp"

namespace ewm {

namespace {

using Pchip = boost::math::interpolators::pchip<std::vector<double>>;

double sin_half_sq(double r) {
  const double s = std::sin(0.5 * r);
  return s * s;
}

}  // namespace

struct SurfaceProfile::Table {
  std::vector<double> r;
  Pchip spline;
  double k_left = 0.0;
  double k_right = 0.0;

  Table(std::vector<double> rr, std::vector<double> ff)
      : r(rr), spline(std::move(rr), std::move(ff)) {}

  std::size_t segment(double x) const {
    auto it = std::upper_bound(r.begin(), r.end(), x);
    std::size_t j = it == r.begin() ? 0 : static_cast<std::size_t>(it - r.begin()) - 1;
    return std::min(j, r.size() - 2);
  }

  // The PCHIP derivative is quadratic on each segment; fit it exactly and differentiate.
  double second_derivative(double x) const {
    const std::size_t j = segment(x);
    const double a = r[j];
    const double d = r[j + 1] - a;
    const double m = a + 0.5 * d;
    const double q1 = spline.prime(a + 0.25 * d);
    const double q2 = spline.prime(m);
    const double q3 = spline.prime(a + 0.75 * d);
    const double slope = (q3 - q1) / (0.5 * d);
    const double curv = (q3 - 2.0 * q2 + q1) / (0.0625 * d * d);
    return slope + curv * (x - m);
  }
};

SurfaceProfile::SurfaceProfile(Kind kind, double R, double eps, std::shared_ptr<const Table> table)
    : kind_(kind), R_(R), eps_(eps), table_(std::move(table)) {}

SurfaceProfile SurfaceProfile::round() { return {Kind::round, std::numbers::pi, 0.0, nullptr}; }

SurfaceProfile SurfaceProfile::bumpy(double eps) {
  if (!std::isfinite(eps) || eps <= -1.0 / 3.0)
    fail(ErrorCode::invalid_argument, "bumpy profile needs eps > -1/3");
  return {Kind::bumpy, std::numbers::pi, eps, nullptr};
}

SurfaceProfile SurfaceProfile::flat(double R) {
  if (!(R > 0.0) || !std::isfinite(R)) fail(ErrorCode::invalid_argument, "flat profile needs R > 0");
  return {Kind::flat, R, 0.0, nullptr};
}

SurfaceProfile SurfaceProfile::tabulated(std::vector<double> r, std::vector<double> f) {
  if (r.size() != f.size() || r.size() < 8)
    fail(ErrorCode::invalid_argument, "tabulated profile needs at least 8 (r, f) pairs");
  if (r.front() != 0.0) fail(ErrorCode::invalid_argument, "tabulated profile must start at r = 0");
  for (std::size_t i = 1; i < r.size(); ++i)
    if (!(r[i] > r[i - 1])) fail(ErrorCode::invalid_argument, "tabulated r must be strictly increasing");
  for (double v : f)
    if (!std::isfinite(v)) fail(ErrorCode::invalid_argument, "tabulated f must be finite");
  const double R = r.back();
  auto table = std::make_shared<Table>(std::move(r), std::move(f));
  const double r1 = table->r[1];
  const double rn = table->r[table->r.size() - 2];
  table->k_left = -table->second_derivative(r1) / table->spline(r1);
  table->k_right = -table->second_derivative(rn) / table->spline(rn);
  return {Kind::tabulated, R, 0.0, std::move(table)};
}

SurfaceProfile SurfaceProfile::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open profile table '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::io, "empty profile table '" + path + "'");
  line.erase(std::remove_if(line.begin(), line.end(), ::isspace), line.end());
  if (line != "r,f") fail(ErrorCode::io, "profile table '" + path + "' must start with header r,f");
  std::vector<double> rs, fs;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ss(line);
    double a = 0.0, b = 0.0;
    char comma = 0;
    if (!(ss >> a >> comma >> b) || comma != ',')
      fail(ErrorCode::io, path + ":" + std::to_string(lineno) + ": expected 'r,f'");
    rs.push_back(a);
    fs.push_back(b);
  }
  return tabulated(std::move(rs), std::move(fs));
}

std::string SurfaceProfile::name() const {
  switch (kind_) {
    case Kind::round: return "round";
    case Kind::bumpy: {
      std::ostringstream os;
      os << "bumpy(" << eps_ << ")";
      return os.str();
    }
    case Kind::flat: return "flat";
    case Kind::tabulated: return "tabulated";
  }
  return "unknown";
}

Jet SurfaceProfile::eval(double r) const {
  if (!(r >= 0.0 && r <= R_)) {
    std::ostringstream os;
    os << "r = " << r << " outside [0, " << R_ << "]";
    fail(ErrorCode::domain, os.str());
  }
  return eval_unchecked(r);
}

Jet SurfaceProfile::eval_extended(double r) const {
  if (kind_ != Kind::tabulated) return eval_unchecked(r);
  // Odd reflection about whichever pole r lies beyond.
  if (r < 0.0) {
    Jet j = eval_extended(-r);
    j.f = -j.f;
    j.fpp = -j.fpp;
    return j;
  }
  if (r > R_) {
    Jet j = eval_extended(2.0 * R_ - r);
    j.f = -j.f;
    j.fpp = -j.fpp;
    return j;
  }
  return eval_unchecked(r);
}

Jet SurfaceProfile::eval_unchecked(double r) const {
  Jet j;
  switch (kind_) {
    case Kind::round: {
      const double s = std::sin(r), c = std::cos(r);
      j.f = s;
      j.fp = c;
      j.fpp = -s;
      j.k = 1.0;
      j.one_minus_fp2 = s * s;
      j.fp_minus_one = -2.0 * sin_half_sq(r);
      break;
    }
    case Kind::bumpy: {
      const double s = std::sin(r), c = std::cos(r), e = eps_;
      const double s2 = s * s, c2 = c * c;
      j.f = s + e * s2 * s;
      j.fp = c * (1.0 + 3.0 * e * s2);
      j.fpp = -s - 3.0 * e * s2 * s + 6.0 * e * s * c2;
      j.k = (1.0 + 3.0 * e * s2 - 6.0 * e * c2) / (1.0 + e * s2);
      j.one_minus_fp2 = s2 * (1.0 - c2 * (6.0 * e + 9.0 * e * e * s2));
      j.fp_minus_one = -2.0 * sin_half_sq(r) + 3.0 * e * s2 * c;
      break;
    }
    case Kind::flat: {
      j.f = r;
      j.fp = 1.0;
      j.fpp = 0.0;
      j.k = 0.0;
      j.one_minus_fp2 = 0.0;
      j.fp_minus_one = 0.0;
      break;
    }
    case Kind::tabulated: {
      const Table& t = *table_;
      const double x = std::clamp(r, 0.0, R_);
      j.f = t.spline(x);
      j.fp = t.spline.prime(x);
      j.fpp = t.second_derivative(x);
      if (x <= t.r[1] && j.f <= 0.0)
        j.k = t.k_left;
      else if (x >= t.r[t.r.size() - 2] && j.f <= 0.0)
        j.k = t.k_right;
      else
        j.k = -j.fpp / j.f;
      j.one_minus_fp2 = (1.0 - j.fp) * (1.0 + j.fp);
      j.fp_minus_one = j.fp - 1.0;
      break;
    }
  }
  return j;
}

TargetProfile TargetProfile::round() { return TargetProfile{}; }

double TargetProfile::g(double a) const { return std::sin(a); }
double TargetProfile::gp(double a) const { return std::cos(a); }
double TargetProfile::gpp(double a) const { return -std::sin(a); }
double TargetProfile::G(double a) const { return 2.0 * sin_half_sq(a); }

bool ValidationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const ProfileCheck& c) { return c.passed; });
}

const ProfileCheck* ValidationReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

namespace {

// Ratios |f(x) - (x - k x^3 / 6)| / x^3 on a geometric sequence x = R 2^-j; should decrease.
ProfileCheck expansion_check(const std::string& name, double R, double k0, auto&& f_at) {
  ProfileCheck c{name, true, 0.0};
  double prev = INFINITY;
  for (int j = 3; j <= 10; ++j) {
    const double x = R * std::ldexp(1.0, -j);
    const double ratio = std::abs(f_at(x) - (x - k0 * x * x * x / 6.0)) / (x * x * x);
    if (!(ratio <= prev * (1.0 + 1e-9) + 1e-12)) c.passed = false;
    prev = ratio;
    c.measured = ratio;
  }
  return c;
}

}  // namespace

ValidationReport validate_profile(const SurfaceProfile& p, const ValidationOptions& opts) {
  if (opts.samples < 16) fail(ErrorCode::invalid_argument, "validate_profile needs at least 16 samples");
  ValidationReport rep;
  rep.profile = p.name();
  const double R = p.R();
  rep.pole_margin = opts.pole_margin_fraction * R;
  const Jet j0 = p.eval(0.0), jR = p.eval(R);

  auto add = [&](std::string name, double measured, bool ok) { rep.checks.push_back({std::move(name), ok, measured}); };
  add("f(0)=0", std::abs(j0.f), std::abs(j0.f) <= opts.tol);
  add("f(R)=0", std::abs(jR.f), std::abs(jR.f) <= opts.tol);
  add("f'(0)=1", std::abs(j0.fp - 1.0), std::abs(j0.fp - 1.0) <= opts.tol);
  add("f'(R)=-1", std::abs(jR.fp + 1.0), std::abs(jR.fp + 1.0) <= opts.tol);

  double fmin = INFINITY, kmin = INFINITY;
  for (int i = 1; i < opts.samples - 1; ++i) {
    const double r = R * i / (opts.samples - 1);
    const Jet j = p.eval(r);
    fmin = std::min(fmin, j.f);
    if (r <= rep.pole_margin || r >= R - rep.pole_margin) kmin = std::min(kmin, j.k);
  }
  kmin = std::min({kmin, j0.k, jR.k});
  add("f>0 interior", fmin, fmin > 0.0);
  add("k>0 near poles", kmin, kmin > 0.0);
  rep.checks.push_back(expansion_check("pole expansion r=0", R, j0.k, [&](double x) { return p.f(x); }));
  rep.checks.push_back(expansion_check("pole expansion r=R", R, jR.k, [&](double x) { return p.f(R - x); }));
  return rep;
}

double arclength_coordinate(const SurfaceProfile& p, double r) {
  const double R = p.R();
  if (!(r > 0.0 && r < R)) fail(ErrorCode::domain, "arclength coordinate diverges at the poles");
  const double mid = 0.5 * R;
  if (p.kind() == SurfaceProfile::Kind::round) return std::log(std::tan(0.5 * r));
  if (p.kind() == SurfaceProfile::Kind::flat) return std::log(r / mid);
  // Subtract the logarithmic pole singularities and integrate the bounded remainder.
  auto smooth = [&](double t) { return 1.0 / p.f(t) - 1.0 / t - 1.0 / (R - t); };
  const double rest = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(smooth, mid, r, 15, 1e-13);
  return rest + std::log(r / mid) - std::log((R - r) / mid);
}

}  // namespace ewm
