#pragma once
// The nonlinearity library: families of Phi/Phi0 with value, one-sided
// derivatives, kink bookkeeping, and monotonicity probes.

#include <optional>
#include <string>
#include <vector>

namespace fblab {

enum class PhiFamily : int {
  Linear,        // Phi0(r) = coeff * r
  Power,         // Phi0(r) = coeff * r^p, p in (0,1]
  SumOfPowers,   // Phi(r1,r2) = r1^{1+alpha}/(1+alpha) + r2^{1-beta}/(1-beta)
  Nonexistence,  // piecewise: r | (5-2r)/8 | 1, with a genuine jump at r=1
  Saddle,        // C1 spline: 0 up to 2 at pi/4, down to flat 1 from pi/2 on
  Tabulated,     // piecewise-linear table of (r, value)
};

struct PhiDeriv {
  double left = 0.0;
  double right = 0.0;
  bool kink = false;
  double value() const { return right; }  // solver convention: right derivative
};

struct LambdaJump {
  double lo = 0.0, hi = 0.0;
  bool kink = false;
  double value() const { return hi == lo ? lo : 0.5 * (lo + hi); }
};

struct PhiSpec {
  PhiFamily family = PhiFamily::Linear;
  double coeff = 1.0;   // Linear / Power scale
  double p = 1.0;       // Power exponent
  double alpha = 0.0;   // SumOfPowers exponents
  double beta = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 1.0;
  // Weighted measure of the whole domain; required by two-argument families
  // (set when the spec is attached to a Problem).
  double lambda_omega = 0.0;
  std::vector<std::pair<double, double>> table;  // Tabulated knots, sorted by r

  std::string regularity;  // "smooth", "c1-spline", "kink", "jump"

  double phi0(double r) const;
  PhiDeriv dphi0(double r) const;
  // Two-argument partials where the family defines Phi(r1,r2); nullopt for
  // reduced-only families.
  std::optional<double> dphi_dr1(double r1, double r2) const;
  std::optional<double> dphi_dr2(double r1, double r2) const;
  std::vector<double> kink_abscissae() const;
  bool has_jump() const { return family == PhiFamily::Nonexistence; }

  static PhiSpec linear(double lambda, double lambda2 = 1.0, double lambda1 = 0.0);
  static PhiSpec power(double coeff, double p, double lambda2 = 1.0);
  static PhiSpec sum_of_powers(double alpha, double beta, double lambda1, double lambda2);
  static PhiSpec nonexistence();
  static PhiSpec saddle();
  static PhiSpec tabulated(std::vector<std::pair<double, double>> knots,
                           double lambda2 = 1.0, double lambda1 = 0.0);
};

// (Phi0(r), derivative info); r < 0 rejected.
std::pair<double, PhiDeriv> phi0_value_and_derivative(const PhiSpec& phi, double r);

struct MonotonicityReport {
  bool monotone = true;
  double violation_lo = 0.0, violation_hi = 0.0;  // sampled bracket when !monotone
};
// Samples Phi0' on (0, lambda2*lambda_omega); one-sided values at kinks.
MonotonicityReport check_monotonicity(const PhiSpec& phi, double lambda_omega, int samples);

// Gradient-jump coefficient Lambda(p); kink at m2 yields an interval.
LambdaJump lambda_bernoulli(const PhiSpec& phi, double m1, double m2, double q_at_p);

// Sampled infima of Phi0' over [lower, upper] for the two interval conventions.
std::pair<double, double> theta_iota(const PhiSpec& phi, double lower, double upper,
                                     int samples);

// Knot abscissae/values of the saddle spline, for manifests.
std::vector<std::pair<double, double>> saddle_knots();

const char* phi_family_name(PhiFamily f);

}  // namespace fblab
