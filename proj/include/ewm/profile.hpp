#pragma once

#include <memory>
#include <string>
#include <vector>

namespace ewm {

/// Value and derivatives of the radial metric coefficient at one point.
/// `one_minus_fp2` and `fp_minus_one` are evaluated without cancellation so
/// that coefficient formulas vanish exactly where they vanish analytically.
struct Jet {
  double f = 0.0;
  double fp = 0.0;
  double fpp = 0.0;
  double k = 0.0;
  double one_minus_fp2 = 0.0;
  double fp_minus_one = 0.0;
};

/// Metric dr^2 + f(r)^2 dtheta^2 on [0, R].
class SurfaceProfile {
 public:
  enum class Kind { round, bumpy, flat, tabulated };

  static SurfaceProfile round();
  /// f(r) = sin r (1 + eps sin^2 r).
  static SurfaceProfile bumpy(double eps);
  /// f(r) = r on [0, R]; a disc, not a closed surface.
  static SurfaceProfile flat(double R = 1.0);
  /// Monotone cubic (PCHIP) interpolation of samples f(r_i), r_0 = 0.
  static SurfaceProfile tabulated(std::vector<double> r, std::vector<double> f);
  /// Two-column CSV with header "r,f".
  static SurfaceProfile from_csv(const std::string& path);

  Kind kind() const { return kind_; }
  double R() const { return R_; }
  double epsilon() const { return eps_; }
  bool closed() const { return kind_ != Kind::flat; }
  std::string name() const;

  /// Throws ewm::Error (domain) for r outside [0, R].
  Jet eval(double r) const;
  /// Evaluates past the poles by odd reflection; used inside integrators.
  Jet eval_extended(double r) const;
  double f(double r) const { return eval(r).f; }

 private:
  struct Table;
  SurfaceProfile(Kind kind, double R, double eps, std::shared_ptr<const Table> table);
  Jet eval_unchecked(double r) const;

  Kind kind_;
  double R_;
  double eps_;
  std::shared_ptr<const Table> table_;
};

/// Target metric d alpha^2 + g(alpha)^2 dtheta^2; only the round target is built in.
class TargetProfile {
 public:
  static TargetProfile round();

  double H() const { return H_; }
  double g(double a) const;
  double gp(double a) const;
  double gpp(double a) const;
  /// Antiderivative of g with G(0) = 0.
  double G(double a) const;
  double vol() const { return 2.0 * 3.14159265358979323846 * (G(H_) - G(0.0)); }
  bool is_round() const { return true; }
  std::string name() const { return "round"; }

 private:
  double H_ = 3.14159265358979323846;
};

struct ProfileCheck {
  std::string name;
  bool passed = false;
  double measured = 0.0;
};

struct ValidationReport {
  std::string profile;
  double pole_margin = 0.0;
  std::vector<ProfileCheck> checks;
  bool all_passed() const;
  const ProfileCheck* find(const std::string& name) const;
};

struct ValidationOptions {
  int samples = 2001;
  /// Pole margin as a fraction of R.
  double pole_margin_fraction = 0.2;
  double tol = 1e-6;
};

ValidationReport validate_profile(const SurfaceProfile& profile, const ValidationOptions& opts = {});

/// s(r) = integral from R/2 to r of dt / f(t); r strictly inside (0, R).
double arclength_coordinate(const SurfaceProfile& profile, double r);

}  // namespace ewm
