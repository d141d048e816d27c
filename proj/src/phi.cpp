#include "fblab/phi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace fblab {

namespace {

// Saddle spline geometry. The constants come from the planar two-phase datum
// u0 = x1*x2 on the unit disk: c1 is the boundary integral of u0+, c2..cstar
// follow from it. cstar is where the spline must already sit above its tail
// minimum so that u0 beats every competitor that grows the positive phase.
struct SaddleGeometry {
  double cstar;
  // Hermite knots (t, value, slope); constant 1 after the last knot.
  double t[4], v[4], s[4];
};

SaddleGeometry saddle_geometry() {
  const double pi = std::numbers::pi;
  const double c1 = 1.0;
  const double c2 = 0.5 * c1 / (pi / 2.0 + 1.0);
  const double c3 = 2.0 + 1.0 / (4.0 * c2);
  const double cstar = std::min(pi / 4.0, c1 / (2.0 * c3));
  SaddleGeometry g;
  g.cstar = cstar;
  g.t[0] = 0.0;      g.v[0] = 0.0;
  g.t[1] = cstar;    g.v[1] = 1.2;
  g.t[2] = pi / 4.0; g.v[2] = 2.0;
  g.t[3] = pi / 2.0; g.v[3] = 1.0;
  // Endpoint slopes equal to the adjacent secant keep each cubic monotone
  // (Fritsch-Carlson region); interior slopes 0 give the hump at pi/4 and the
  // flat landing at pi/2.
  g.s[0] = (g.v[1] - g.v[0]) / (g.t[1] - g.t[0]);
  g.s[1] = (g.v[2] - g.v[1]) / (g.t[2] - g.t[1]);
  g.s[2] = 0.0;
  g.s[3] = 0.0;
  return g;
}

// Cubic Hermite on [t0,t1]: value and derivative.
void hermite(double t0, double t1, double v0, double v1, double s0, double s1,
             double t, double& val, double& der) {
  const double w = t1 - t0;
  const double x = (t - t0) / w;
  const double x2 = x * x, x3 = x2 * x;
  const double h00 = 2 * x3 - 3 * x2 + 1;
  const double h10 = x3 - 2 * x2 + x;
  const double h01 = -2 * x3 + 3 * x2;
  const double h11 = x3 - x2;
  val = h00 * v0 + h10 * w * s0 + h01 * v1 + h11 * w * s1;
  const double d00 = (6 * x2 - 6 * x) / w;
  const double d10 = 3 * x2 - 4 * x + 1;
  const double d01 = (-6 * x2 + 6 * x) / w;
  const double d11 = 3 * x2 - 2 * x;
  der = d00 * v0 + d10 * s0 + d01 * v1 + d11 * s1;
}

void saddle_eval(double r, double& val, double& der) {
  static const SaddleGeometry g = saddle_geometry();
  if (r >= g.t[3]) {
    val = 1.0;
    der = 0.0;
    return;
  }
  int k = 0;
  while (k < 2 && r >= g.t[k + 1]) ++k;
  hermite(g.t[k], g.t[k + 1], g.v[k], g.v[k + 1], g.s[k], g.s[k + 1], r, val, der);
}

double m1_of_m2(const PhiSpec& phi, double m2) {
  return phi.lambda1 * (phi.lambda_omega - m2 / phi.lambda2);
}

double powsafe(double base, double expo) {
  if (expo == 0.0) return 1.0;  // r^0 == 1 including at r=0
  return std::pow(base, expo);
}

int table_segment(const std::vector<std::pair<double, double>>& tab, double r) {
  if (tab.size() < 2 || r < tab.front().first - 1e-12 || r > tab.back().first + 1e-12)
    throw std::domain_error("phi0: r outside tabulated range");
  int k = 0;
  while (k + 2 < (int)tab.size() && r >= tab[k + 1].first) ++k;
  return k;
}

}  // namespace

double PhiSpec::phi0(double r) const {
  if (r < -1e-12) throw std::domain_error("phi0: negative measure");
  r = std::max(r, 0.0);
  switch (family) {
    case PhiFamily::Linear:
      return coeff * r;
    case PhiFamily::Power:
      return coeff * std::pow(r, p);
    case PhiFamily::SumOfPowers: {
      const double r1 = std::max(m1_of_m2(*this, r), 0.0);
      return std::pow(r1, 1.0 + alpha) / (1.0 + alpha) +
             std::pow(r, 1.0 - beta) / (1.0 - beta);
    }
    case PhiFamily::Nonexistence:
      if (r <= 0.5) return r;
      if (r < 1.0) return (5.0 - 2.0 * r) / 8.0;
      return 1.0;
    case PhiFamily::Saddle: {
      double val, der;
      saddle_eval(r, val, der);
      return val;
    }
    case PhiFamily::Tabulated: {
      const int k = table_segment(table, r);
      const auto& [ta, va] = table[k];
      const auto& [tb, vb] = table[k + 1];
      const double x = (r - ta) / (tb - ta);
      return va + x * (vb - va);
    }
  }
  throw std::logic_error("phi0: bad family");
}

PhiDeriv PhiSpec::dphi0(double r) const {
  if (r < -1e-12) throw std::domain_error("dphi0: negative measure");
  r = std::max(r, 0.0);
  PhiDeriv d;
  switch (family) {
    case PhiFamily::Linear:
      d.left = d.right = coeff;
      return d;
    case PhiFamily::Power: {
      if (r == 0.0 && p < 1.0) {
        d.left = d.right = std::numeric_limits<double>::infinity();
        return d;
      }
      d.left = d.right = coeff * p * std::pow(r, p - 1.0);
      return d;
    }
    case PhiFamily::SumOfPowers: {
      const double r1 = std::max(m1_of_m2(*this, r), 0.0);
      const double d1 = powsafe(r1, alpha);
      const double d2 = (r == 0.0 && beta > 0.0)
                            ? std::numeric_limits<double>::infinity()
                            : powsafe(r, -beta);
      d.left = d.right = d2 - (lambda1 / lambda2) * d1;
      return d;
    }
    case PhiFamily::Nonexistence: {
      if (r == 0.5) {
        d.left = 1.0;
        d.right = -0.25;
        d.kink = true;
      } else if (r == 1.0) {
        d.left = -0.25;  // slope arriving at the jump
        d.right = 0.0;
        d.kink = true;
      } else if (r < 0.5) {
        d.left = d.right = 1.0;
      } else if (r < 1.0) {
        d.left = d.right = -0.25;
      } else {
        d.left = d.right = 0.0;
      }
      return d;
    }
    case PhiFamily::Saddle: {
      double val, der;
      saddle_eval(r, val, der);
      d.left = d.right = der;
      return d;
    }
    case PhiFamily::Tabulated: {
      const int k = table_segment(table, r);
      const double slope = (table[k + 1].second - table[k].second) /
                           (table[k + 1].first - table[k].first);
      d.left = d.right = slope;
      // Landing exactly on an interior knot exposes both one-sided slopes.
      for (size_t j = 1; j + 1 < table.size(); ++j) {
        if (std::abs(r - table[j].first) < 1e-12) {
          d.left = (table[j].second - table[j - 1].second) /
                   (table[j].first - table[j - 1].first);
          d.right = (table[j + 1].second - table[j].second) /
                    (table[j + 1].first - table[j].first);
          d.kink = std::abs(d.left - d.right) > 1e-12;
        }
      }
      return d;
    }
  }
  throw std::logic_error("dphi0: bad family");
}

std::optional<double> PhiSpec::dphi_dr1(double r1, double r2) const {
  (void)r2;
  if (family != PhiFamily::SumOfPowers) return std::nullopt;
  return powsafe(std::max(r1, 0.0), alpha);
}

std::optional<double> PhiSpec::dphi_dr2(double r1, double r2) const {
  (void)r1;
  if (family != PhiFamily::SumOfPowers) return std::nullopt;
  if (r2 == 0.0 && beta > 0.0) return std::numeric_limits<double>::infinity();
  return powsafe(std::max(r2, 0.0), -beta);
}

std::vector<double> PhiSpec::kink_abscissae() const {
  switch (family) {
    case PhiFamily::Nonexistence:
      return {0.5, 1.0};
    case PhiFamily::Tabulated: {
      std::vector<double> k;
      for (size_t j = 1; j + 1 < table.size(); ++j) k.push_back(table[j].first);
      return k;
    }
    default:
      return {};
  }
}

PhiSpec PhiSpec::linear(double lambda, double lambda2, double lambda1) {
  PhiSpec s;
  s.family = PhiFamily::Linear;
  s.coeff = lambda;
  s.lambda2 = lambda2;
  s.lambda1 = lambda1;
  s.regularity = "smooth";
  return s;
}

PhiSpec PhiSpec::power(double coeff, double p, double lambda2) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("power: p outside (0,1]");
  PhiSpec s;
  s.family = PhiFamily::Power;
  s.coeff = coeff;
  s.p = p;
  s.lambda2 = lambda2;
  s.regularity = "smooth";
  return s;
}

PhiSpec PhiSpec::sum_of_powers(double alpha, double beta, double lambda1, double lambda2) {
  if (!(beta >= 0.0 && beta < 1.0)) throw std::invalid_argument("sum_of_powers: beta outside [0,1)");
  if (alpha < 0.0) throw std::invalid_argument("sum_of_powers: alpha negative");
  PhiSpec s;
  s.family = PhiFamily::SumOfPowers;
  s.alpha = alpha;
  s.beta = beta;
  s.lambda1 = lambda1;
  s.lambda2 = lambda2;
  s.regularity = "smooth";
  return s;
}

PhiSpec PhiSpec::nonexistence() {
  PhiSpec s;
  s.family = PhiFamily::Nonexistence;
  s.lambda2 = 1.0;
  s.regularity = "jump";
  return s;
}

PhiSpec PhiSpec::saddle() {
  PhiSpec s;
  s.family = PhiFamily::Saddle;
  s.lambda2 = 1.0;
  s.regularity = "c1-spline";
  return s;
}

PhiSpec PhiSpec::tabulated(std::vector<std::pair<double, double>> knots,
                           double lambda2, double lambda1) {
  if (knots.size() < 2) throw std::invalid_argument("tabulated: need at least 2 knots");
  std::sort(knots.begin(), knots.end());
  for (size_t j = 1; j < knots.size(); ++j)
    if (knots[j].first - knots[j - 1].first < 1e-14)
      throw std::invalid_argument("tabulated: duplicate abscissa");
  PhiSpec s;
  s.family = PhiFamily::Tabulated;
  s.table = std::move(knots);
  s.lambda2 = lambda2;
  s.lambda1 = lambda1;
  s.regularity = "kink";
  return s;
}

std::pair<double, PhiDeriv> phi0_value_and_derivative(const PhiSpec& phi, double r) {
  return {phi.phi0(r), phi.dphi0(r)};
}

MonotonicityReport check_monotonicity(const PhiSpec& phi, double lambda_omega, int samples) {
  MonotonicityReport rep;
  const double hi = phi.lambda2 * lambda_omega;
  if (samples < 2 || hi <= 0.0) return rep;
  auto probe = [&](double r) -> double {
    const PhiDeriv d = phi.dphi0(r);
    return std::min(d.left, d.right);
  };
  std::vector<double> pts;
  pts.reserve(samples + 4);
  for (int i = 0; i < samples; ++i) pts.push_back(hi * (i + 0.5) / samples);
  for (double k : phi.kink_abscissae())
    if (k > 0.0 && k < hi) pts.push_back(k);
  std::sort(pts.begin(), pts.end());
  for (size_t i = 0; i < pts.size(); ++i) {
    if (probe(pts[i]) < -1e-12) {
      rep.monotone = false;
      rep.violation_lo = i == 0 ? 0.0 : pts[i - 1];
      rep.violation_hi = i + 1 == pts.size() ? hi : pts[i + 1];
      return rep;
    }
  }
  return rep;
}

LambdaJump lambda_bernoulli(const PhiSpec& phi, double m1, double m2, double q_at_p) {
  LambdaJump out;
  if (phi.family == PhiFamily::SumOfPowers) {
    const double d1 = *phi.dphi_dr1(m1, m2);
    const double d2 = *phi.dphi_dr2(m1, m2);
    out.lo = out.hi = (phi.lambda2 * d2 - phi.lambda1 * d1) * q_at_p;
    return out;
  }
  const PhiDeriv d = phi.dphi0(m2);
  const double a = phi.lambda2 * d.left * q_at_p;
  const double b = phi.lambda2 * d.right * q_at_p;
  out.lo = std::min(a, b);
  out.hi = std::max(a, b);
  out.kink = d.kink;
  return out;
}

std::pair<double, double> theta_iota(const PhiSpec& phi, double lower, double upper,
                                     int samples) {
  if (!(lower >= 0.0 && lower < upper)) throw std::invalid_argument("theta_iota: bad interval");
  if (samples < 2) samples = 2;
  auto probe = [&](double r) -> double {
    const PhiDeriv d = phi.dphi0(r);
    return std::min(d.left, d.right);
  };
  // Theta: open-interval convention (midpoint samples only).
  double theta = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i)
    theta = std::min(theta, probe(lower + (upper - lower) * (i + 0.5) / samples));
  // iota: closed interval, endpoints sampled exactly (one-sided there).
  double iota = std::min(phi.dphi0(lower).right, phi.dphi0(upper).left);
  for (int i = 1; i < samples; ++i)
    iota = std::min(iota, probe(lower + (upper - lower) * i / samples));
  for (double k : phi.kink_abscissae()) {
    if (k > lower && k < upper) {
      theta = std::min(theta, probe(k));
      iota = std::min(iota, probe(k));
    }
  }
  return {theta, iota};
}

std::vector<std::pair<double, double>> saddle_knots() {
  const SaddleGeometry g = saddle_geometry();
  std::vector<std::pair<double, double>> out;
  for (int k = 0; k < 4; ++k) out.emplace_back(g.t[k], g.v[k]);
  return out;
}

const char* phi_family_name(PhiFamily f) {
  switch (f) {
    case PhiFamily::Linear: return "linear";
    case PhiFamily::Power: return "power";
    case PhiFamily::SumOfPowers: return "sum_of_powers";
    case PhiFamily::Nonexistence: return "nonexistence";
    case PhiFamily::Saddle: return "saddle";
    case PhiFamily::Tabulated: return "tabulated";
  }
  return "?";
}

}  // namespace fblab
