// Acceptance gate: nine end-to-end checks against the analytic benchmarks,
// one verdict line each, nonzero exit when any check fails. Tolerances are
// pinned here on purpose; tune scenarios, not thresholds.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fblab/blowup.hpp"
#include "fblab/cli.hpp"
#include "fblab/energy.hpp"
#include "fblab/fbgeom.hpp"
#include "fblab/field.hpp"
#include "fblab/grid.hpp"
#include "fblab/oracle.hpp"
#include "fblab/phi.hpp"
#include "fblab/problem.hpp"
#include "fblab/solve.hpp"

using namespace fblab;

namespace {

constexpr double kPi = std::numbers::pi;

struct Gate {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (detail.tellp() > 0) detail << "; ";
      detail << what;
    }
  }
  void note(const std::string& what) {
    if (detail.tellp() > 0) detail << "; ";
    detail << what;
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// Monotone-Phi0 minimizers accumulated while the criteria run; criterion 8
// replays the invariant matrix on all of them.
std::vector<std::pair<std::string, std::pair<Field, Problem>>> g_minimizers;

void collect(const std::string& label, const Field& u, const Problem& prob) {
  g_minimizers.push_back({label, {u, prob}});
}

Field datum_linear(const Grid& g, double a, double b, double c) {
  return sample_field(g, [=](double x, double y) { return a * x + b * y + c; });
}

// One-plane boundary datum with a compact sinusoidal modulation along y.
Field datum_one_plane(const Grid& g, double slope, double x0, double amp) {
  const double span = g.dim == 2 ? g.h * (g.ny - 1) : 1.0;
  const double oy = g.oy;
  return sample_field(g, [=](double x, double y) {
    const double mod = amp == 0.0 ? 1.0 : 1.0 + amp * std::sin(kPi * (y - oy) / span);
    return slope * std::max(x - x0, 0.0) * mod;
  });
}

double median_of(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Independent quadrature evaluation of the scale-invariant boundary monitor
// for the plane u = s * x^+ centered on its front: midpoint rules in r and
// theta with the phase transition pinned to sample-cell boundaries, no grid
// involved anywhere.
double weiss_quadrature_plane(double s, double lambda0, double R) {
  const int nth = 4096;  // divisible by 4: the transition stays off-sample
  const int nr = 512;
  double bulk = 0.0;
  for (int ir = 0; ir < nr; ++ir) {
    const double r = (ir + 0.5) * R / nr;
    int positive = 0;
    for (int it = 0; it < nth; ++it) {
      const double th = 2.0 * kPi * (it + 0.5) / nth;
      if (r * std::cos(th) > 0.0) ++positive;
    }
    bulk += (s * s + lambda0 * lambda0) * positive * (2.0 * kPi / nth) * r * (R / nr);
  }
  double ring = 0.0;
  for (int it = 0; it < nth; ++it) {
    const double th = 2.0 * kPi * (it + 0.5) / nth;
    const double val = s * std::max(R * std::cos(th), 0.0);
    ring += val * val;
  }
  ring *= 2.0 * kPi * R / nth;
  return bulk / (R * R) - ring / (R * R * R);
}

// Free-boundary point nearest y = yc whose surrounding box stays inside the
// unit square with the given margin.
const FBPoint* pick_center(const FreeBoundary& fb, double yc, double margin) {
  const FBPoint* best = nullptr;
  double best_d = 1e300;
  for (const FBPoint& p : fb.points) {
    if (p.x < margin || p.x > 1.0 - margin || p.y < margin || p.y > 1.0 - margin) continue;
    const double d = std::abs(p.y - yc);
    if (d < best_d) {
      best_d = d;
      best = &p;
    }
  }
  return best;
}

// --- criterion 1: the degenerating 1D family ------------------------------

void criterion_degenerating_family(Gate& gate) {
  const auto rows = repro_nonexistence({8, 16, 32, 64});
  gate.require(rows.size() == 4, "expected 4 rows");
  double prev = 1e300;
  for (const ReproRow& r : rows) {
    const double analytic = 1.0 / (1.0 - r.h) + (3.0 + 2.0 * r.h) / 8.0;
    gate.require(std::abs(r.analytic - analytic) <= 1e-12, "analytic column mismatch");
    gate.require(std::abs(r.j_h - r.analytic) <= 1e-3,
                 "J(h=" + fmt(r.h) + ") off by " + fmt(r.j_h - r.analytic));
    gate.require(r.j_h < prev, "J not strictly decreasing at h=" + fmt(r.h));
    gate.require(std::abs(r.zero_measure - r.h) <= 1e-9,
                 "zero set not one cell at h=" + fmt(r.h));
    prev = r.j_h;
  }
  gate.require(prev > 11.0 / 8.0, "J crossed the infimum 11/8");
  gate.note("J(1/64)=" + fmt(prev) + " vs inf 11/8, gap " + fmt(prev - 11.0 / 8.0));
}

// --- criterion 2: exhaustive oracle vs descent solver ----------------------

void criterion_oracle_equivalence(Gate& gate) {
  std::mt19937 rng(20240819u);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  SolverConfig cfg;
  cfg.restarts = 8;

  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    PhiSpec phi;
    if (k % 3 == 0) {
      phi = PhiSpec::linear(0.5 + 3.5 * U(rng));
    } else if (k % 3 == 1) {
      phi = PhiSpec::power(0.5 + 2.5 * U(rng), 0.35 + 0.65 * U(rng));
    } else {
      const double a = 0.1 + 1.4 * U(rng), b = 0.1 + 1.4 * U(rng);
      phi = PhiSpec::tabulated({{0.0, 0.0}, {0.7, a}, {2.0, a + b}});
    }
    const int nodes = 7 + 2 * (k % 3);  // 5, 7, 9 interior nodes
    const Grid g = make_interval(nodes);
    const Field datum = k % 5 == 4
                            ? sample_field(g, [](double x, double) { return x - 0.3; })
                            : sample_field(g, [](double x, double) { return x; });
    const Problem prob{g, datum, QField::uniform(1.0), phi};
    const MinimizeResult direct = minimize_direct(prob, cfg);
    const OracleResult oracle = oracle_minimize_1d(prob);
    const double gap = std::abs(direct.breakdown.total - oracle.energy);
    worst = std::max(worst, gap);
    gate.require(gap <= 1e-6, "1D spec " + std::to_string(k) + " gap " + fmt(gap));
  }

  for (int k = 0; k < 4; ++k) {
    PhiSpec phi;
    if (k == 0) phi = PhiSpec::linear(2.0);
    else if (k == 1) phi = PhiSpec::power(1.5, 0.5);
    else if (k == 2) phi = PhiSpec::linear(0.5 + 3.5 * U(rng));
    else phi = PhiSpec::tabulated({{0.0, 0.0}, {0.7, 0.9}, {2.0, 1.6}});
    const Grid g = make_rectangle(5, 5, 0.0, 0.0, 1.0, 1.0);
    const Problem prob{g, datum_linear(g, 1.0, 0.0, 0.0), QField::uniform(1.0), phi};
    const MinimizeResult direct = minimize_direct(prob, cfg);
    const OracleResult oracle = oracle_minimize_2d_tiny(prob);
    const double gap = std::abs(direct.breakdown.total - oracle.energy);
    worst = std::max(worst, gap);
    gate.require(gap <= 1e-6, "2D spec " + std::to_string(k) + " gap " + fmt(gap));
  }
  gate.note("worst |direct - oracle| = " + fmt(worst));
}

// --- criterion 3: the 1D one-phase benchmark ------------------------------

void criterion_one_phase_1d(Gate& gate) {
  const Grid g = make_interval(257);
  const double h = g.h;
  const Problem prob{g, datum_linear(g, 1.0, 0.0, 0.0), QField::uniform(1.0),
                     PhiSpec::linear(4.0)};
  const MinimizeResult res = minimize_direct(prob, SolverConfig{});
  gate.require(res.converged, "solver did not converge");
  gate.require(std::abs(res.breakdown.total - 4.0) <= 0.05,
               "J=" + fmt(res.breakdown.total));

  const FreeBoundary fb = extract_free_boundary(res.field);
  gate.require(fb.points.size() == 1, "expected one crossing");
  if (!fb.points.empty()) {
    const double xf = fb.points.front().x;
    gate.require(std::abs(xf - 0.5) <= 2.0 * h, "front at " + fmt(xf));
    const SlopePair sl =
        one_sided_slopes(res.field, xf, 0.0, -1.0, 0.0, {h, 2.0 * h, 3.0 * h});
    gate.require(std::abs(sl.alpha - 2.0) <= 0.05 * 2.0, "slope " + fmt(sl.alpha));
    gate.note("J=" + fmt(res.breakdown.total) + ", front=" + fmt(xf) +
              ", slope=" + fmt(sl.alpha));
  }
  collect("one-phase-1d", res.field, prob);
}

// --- criterion 4: the saddle disk is a flat-front minimizer ----------------

void criterion_saddle_disk(Gate& gate) {
  const SaddleRepro rep = repro_saddle(128, 200);
  const double expected = kPi / 2.0 + 1.0;
  gate.require(std::abs(rep.j_expected - expected) <= 1e-12, "benchmark mismatch");
  gate.require(std::abs(rep.j_value - expected) <= 0.02 * expected,
               "J=" + fmt(rep.j_value));
  gate.require(std::abs(rep.c1 - 1.0) <= 0.02, "c1=" + fmt(rep.c1));
  gate.require(rep.min_gap >= -1e-6 * rep.j_value, "min gap " + fmt(rep.min_gap));
  gate.require(!rep.flatness.empty(), "no flatness samples");
  for (const auto& [r, f] : rep.flatness)
    gate.require(f >= 0.5, "flatness " + fmt(f) + " at r=" + fmt(r));
  gate.require(rep.pass, "internal gate");

  const SaddleRepro fine = repro_saddle(256, 0);
  for (const auto& [r, f] : fine.flatness)
    gate.require(f >= 0.5, "flatness " + fmt(f) + " at r=" + fmt(r) + " (256)");
  gate.note("J=" + fmt(rep.j_value) + ", min gap=" + fmt(rep.min_gap) +
            ", c1=" + fmt(rep.c1));
}

// --- criterion 5: the self-driven Bernoulli condition ----------------------

void criterion_bernoulli_medians(Gate& gate) {
  std::vector<double> medians;
  for (const int nodes : {129, 257}) {
    const Grid g = make_rectangle(nodes, nodes, 0.0, 0.0, 1.0, 1.0);
    const Problem prob{g, datum_one_plane(g, 2.0, 0.25, 0.15), QField::uniform(1.0),
                       PhiSpec::linear(4.0)};
    const MinimizeResult res = minimize_direct(prob, SolverConfig{});
    gate.require(res.converged, "no convergence at " + std::to_string(nodes));
    FreeBoundary fb = extract_free_boundary(res.field);
    gate.require(!fb.empty(), "no front at " + std::to_string(nodes));
    const BernoulliStats st = bernoulli_residuals(res.field, fb, prob.phi, prob.q);
    gate.require(st.count > 10, "too few usable front points");
    gate.require(st.median <= 0.10,
                 "median " + fmt(st.median) + " at n=" + std::to_string(nodes));
    medians.push_back(st.median);
    collect("bernoulli-" + std::to_string(nodes), res.field, prob);
  }
  if (medians.size() == 2) {
    gate.require(medians[1] <= 2.0 * medians[0] + 1e-12,
                 "refinement regressed: " + fmt(medians[0]) + " -> " + fmt(medians[1]));
    gate.note("medians " + fmt(medians[0]) + " -> " + fmt(medians[1]));
  }
}

// --- criterion 6: blow-up converges onto the linearized problem ------------

void criterion_blowup_limit(Gate& gate) {
  // Datum slope 1.19 is the self-consistent front slope sqrt(Phi0'(1/2)) for
  // a front near x = 1/2, so the minimizer stays close to a plane.
  const Grid g = make_rectangle(129, 129, 0.0, 0.0, 1.0, 1.0);
  const Problem prob{g, datum_one_plane(g, 1.19, 0.5, 0.10), QField::uniform(1.0),
                     PhiSpec::power(2.0, 0.5)};
  const MinimizeResult res = minimize_direct(prob, SolverConfig{});
  gate.require(res.converged, "no convergence");
  const FreeBoundary fb = extract_free_boundary(res.field);
  const FBPoint* c = pick_center(fb, 0.5, 0.3);
  gate.require(c != nullptr, "no usable blow-up center");
  if (!c) return;

  // rho_K = 0.25 / 2^K stays at 8h on the 129^2 grid with K = 2.
  const BlowupSequence seq =
      blowup_sequence(res.field, c->x, c->y, 0.25, 2, default_blowup_grid(2));
  gate.require(seq.sup_diff.size() == 2, "expected two contraction steps");
  for (size_t k = 0; k + 1 < seq.sup_diff.size(); ++k)
    gate.require(seq.sup_diff[k + 1] <= seq.sup_diff[k] + 1e-12,
                 "sup gaps increased: " + fmt(seq.sup_diff[k]) + " -> " +
                     fmt(seq.sup_diff[k + 1]));

  const AcLimitOut ac = ac_limit_compare(seq, prob.phi, prob.q, res.breakdown.m2,
                                         SolverConfig{});
  gate.require(!ac.kink, "unexpected kink in the volume weight");
  const double lam0 = ac.lambda0();
  gate.require(lam0 > 0.0, "bad lambda0");
  const Field& finest = seq.fields.back();
  const double hb = finest.grid.h;
  const SlopePair sl =
      one_sided_slopes(finest, 0.0, 0.0, -1.0, 0.0, {hb, 2.0 * hb, 3.0 * hb});
  const double rel = std::abs(sl.alpha - std::sqrt(lam0)) / std::sqrt(lam0);
  gate.require(rel <= 0.10, "slope gap " + fmt(rel));
  gate.note("center=(" + fmt(c->x) + "," + fmt(c->y) + "), sup gaps " +
            fmt(seq.sup_diff[0]) + " -> " + fmt(seq.sup_diff[1]) + ", lambda0=" +
            fmt(lam0) + ", slope rel err " + fmt(rel));
  collect("blowup-2d", res.field, prob);
}

// --- criterion 7: the lambda fixed point agrees with direct descent --------

void criterion_fixed_point_family(Gate& gate) {
  const double closed_forms[] = {2.0, 3.0, 3.0 * std::cbrt(4.0)};
  const double coeffs[] = {1.0, 2.0, 4.0};
  for (int i = 0; i < 3; ++i) {
    const double c = coeffs[i];
    const Grid g = make_interval(257);
    const Problem prob{g, datum_linear(g, 1.0, 0.0, 0.0), QField::uniform(1.0),
                       PhiSpec::power(c, 0.5)};
    const MinimizeResult direct = minimize_direct(prob, SolverConfig{});
    const MinimizeResult fp = minimize_fixed_point(prob, SolverConfig{});
    gate.require(direct.converged && fp.converged, "c=" + fmt(c) + " no convergence");
    gate.require(std::abs(direct.breakdown.total - closed_forms[i]) <= 0.01,
                 "c=" + fmt(c) + " J=" + fmt(direct.breakdown.total));

    const double m2d = direct.breakdown.m2, m2f = fp.breakdown.m2;
    gate.require(std::abs(m2f - m2d) <= 0.02 * std::max(m2d, 1e-12),
                 "c=" + fmt(c) + " m2 " + fmt(m2d) + " vs " + fmt(m2f));
    const double jd = direct.breakdown.total, jf = fp.breakdown.total;
    gate.require(std::abs(jf - jd) <= 1e-3 * jd,
                 "c=" + fmt(c) + " energy gap " + fmt(jf - jd));
    gate.require(!fp.lambda_trace.empty(), "c=" + fmt(c) + " empty trace");
    if (!fp.lambda_trace.empty()) {
      const double lam_star = fp.lambda_trace.back();
      const double der = prob.phi.dphi0(m2f).right;
      gate.require(std::abs(lam_star - der) <= 1e-3,
                   "c=" + fmt(c) + " lambda* " + fmt(lam_star) + " vs " + fmt(der));
    }
    collect("concave-c" + fmt(c), fp.field, prob);
  }
  gate.note("J = {2, 3, 3*4^(1/3)} reproduced, fixed point self-consistent");
}

// --- criterion 8: the invariant matrix on every computed minimizer ---------

void criterion_invariant_matrix(Gate& gate) {
  gate.require(!g_minimizers.empty(), "no minimizers collected");
  int suites = 0;
  for (const auto& [label, fu] : g_minimizers) {
    const auto rows = property_suite_on_field(fu.first, fu.second);
    for (const PropertyRow& r : rows)
      gate.require(!r.applicable || r.pass,
                   label + ": " + r.name + " value " + fmt(r.value));
    ++suites;
  }

  // Mean value defect of the positive part stays within O(h) across two
  // dyadic refinements of the 1D benchmark.
  std::vector<double> defects;
  for (const int nodes : {65, 129, 257}) {
    const Grid g = make_interval(nodes);
    const Problem prob{g, datum_linear(g, 1.0, 0.0, 0.0), QField::uniform(1.0),
                       PhiSpec::linear(4.0)};
    const MinimizeResult res = minimize_direct(prob, SolverConfig{});
    const SubharmonicityOut sub =
        subharmonicity_defect(res.field, 200, {0.05, 0.1});
    gate.require(sub.max_defect <= 5.0 * g.h,
                 "defect " + fmt(sub.max_defect) + " at n=" + std::to_string(nodes));
    defects.push_back(sub.max_defect);
  }

  // Nondegeneracy ratio is stable within a factor 2 across dyadic radii.
  {
    const Grid g = make_interval(257);
    const Problem prob{g, datum_linear(g, 1.0, 0.0, 0.0), QField::uniform(1.0),
                       PhiSpec::linear(4.0)};
    const MinimizeResult res = minimize_direct(prob, SolverConfig{});
    const FreeBoundary fb = extract_free_boundary(res.field);
    DensityReport rep;
    nondegeneracy_scan(res.field, fb, {4.0 * g.h, 8.0 * g.h, 16.0 * g.h}, &rep);
    gate.require(rep.min_nondeg_ratio.size() == 3, "missing dyadic radii");
    double lo = 1e300, hi = 0.0;
    for (double v : rep.min_nondeg_ratio) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    gate.require(lo > 0.0 && hi / lo <= 2.0,
                 "dyadic ratio spread " + fmt(lo) + " .. " + fmt(hi));
  }
  gate.note(std::to_string(suites) + " minimizers through the matrix, defects " +
            fmt(defects[0]) + "/" + fmt(defects[1]) + "/" + fmt(defects[2]));
}

// --- criterion 9: the scale-invariant monitors -----------------------------

void criterion_monitors(Gate& gate) {
  // (a) quadrature oracle: the boundary-adjusted energy of the exact plane
  // is r-free to quadrature precision.
  const double lam0 = 1.69, s = std::sqrt(lam0);
  std::vector<double> wq;
  for (const double r : {0.2, 0.3, 0.4, 0.5}) wq.push_back(weiss_quadrature_plane(s, lam0, r));
  const auto [qlo, qhi] = std::minmax_element(wq.begin(), wq.end());
  gate.require(*qhi - *qlo <= 1e-6, "quadrature r-variation " + fmt(*qhi - *qlo));
  const double closed = 0.5 * kPi * lam0 * lam0;
  gate.require(std::abs(wq[0] - closed) <= 1e-6,
               "quadrature value " + fmt(wq[0]) + " vs " + fmt(closed));

  // Grid-sampled plane: the discrete monitor lands within O(h) of the oracle.
  const Grid gp = make_rectangle(129, 129, -1.0, -1.0, 1.0, 1.0);
  const Field plane = sample_field(gp, [=](double x, double) { return s * std::max(x, 0.0); });
  double worst_w = 0.0;
  for (const double r : {0.3, 0.5}) {
    const double w = weiss_energy(plane, 0.0, 0.0, r, lam0, WeissMode::Standard);
    worst_w = std::max(worst_w, std::abs(w - closed));
    gate.require(std::abs(w - closed) <= 5.0 * gp.h,
                 "sampled monitor off by " + fmt(w - closed) + " at r=" + fmt(r));
  }

  // (b) two-phase minimizer: the slope-product monitor matches alpha^2 beta^2
  // pi^2 / 4 within 1% and does not decrease in r. The datum is the straight
  // two-plane profile whose slopes already balance the volume weight
  // (alpha^2 - beta^2 = 1.25), so the front stays flat and node-aligned.
  const Grid g = make_rectangle(129, 129, 0.0, 0.0, 1.0, 1.0);
  const Field two_plane = sample_field(g, [](double x, double) {
    return 1.5 * std::max(x - 0.5, 0.0) - std::max(0.5 - x, 0.0);
  });
  const Problem prob{g, two_plane, QField::uniform(1.0), PhiSpec::linear(1.25)};
  const MinimizeResult res = minimize_direct(prob, SolverConfig{}, &two_plane);
  gate.require(res.converged, "two-phase solve did not converge");
  const FreeBoundary fb = extract_free_boundary(res.field);
  const FBPoint* c = pick_center(fb, 0.5, 0.41);
  gate.require(c != nullptr, "no usable monitor center");
  if (!c) return;
  const double h = g.h;
  const SlopePair sl =
      one_sided_slopes(res.field, c->x, c->y, -1.0, 0.0, {h, 2.0 * h, 3.0 * h});
  const double exact = sl.alpha * sl.alpha * sl.beta * sl.beta * kPi * kPi / 4.0;
  gate.require(exact > 0.0, "degenerate slopes at the front");
  std::vector<double> acf;
  for (const double r : {0.2, 0.3, 0.4}) {
    const double v = acf_functional(res.field, c->x, c->y, r, AcfMode::NMinus2);
    gate.require(std::abs(v / exact - 1.0) <= 0.01,
                 "monitor off by " + fmt(v / exact - 1.0) + " at r=" + fmt(r));
    acf.push_back(v);
  }
  // On a plane the monitor is r-free; nondecreasing holds up to the O(h)
  // quadrature wiggle of ball-vs-grid sums (same currency as the 5h gate
  // above), so allow that much downward slack and no more.
  for (size_t i = 0; i + 1 < acf.size(); ++i)
    gate.require(acf[i + 1] >= acf[i] * (1.0 - 2.0 * h),
                 "monitor decreased: " + fmt(acf[i]) + " -> " + fmt(acf[i + 1]));
  gate.note("quad spread " + fmt(*qhi - *qlo) + ", sampled err " + fmt(worst_w) +
            ", slopes (" + fmt(sl.alpha) + "," + fmt(sl.beta) + ")");
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* name;
    std::function<void(Gate&)> run;
  };
  const std::vector<Entry> entries = {
      {1, "degenerating family matches the analytic curve", criterion_degenerating_family},
      {2, "descent solver matches the exhaustive oracle", criterion_oracle_equivalence},
      {3, "1D one-phase benchmark (J, front, slope)", criterion_one_phase_1d},
      {4, "saddle disk: minimality, flatness, boundary mass", criterion_saddle_disk},
      {5, "self-driven Bernoulli medians under refinement", criterion_bernoulli_medians},
      {6, "blow-up contracts onto the linearized problem", criterion_blowup_limit},
      {7, "lambda fixed point vs direct descent, concave family", criterion_fixed_point_family},
      {8, "invariant matrix on every computed minimizer", criterion_invariant_matrix},
      {9, "scale-invariant monitors vs quadrature oracle", criterion_monitors},
  };

  int failures = 0;
  for (const Entry& e : entries) {
    Gate gate;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      e.run(gate);
    } catch (const std::exception& ex) {
      gate.ok = false;
      gate.note(std::string("exception: ") + ex.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] criterion %d: %s (%.1fs)%s%s\n", gate.ok ? "PASS" : "FAIL", e.id,
                e.name, secs, gate.detail.tellp() > 0 ? " | " : "",
                gate.detail.str().c_str());
    std::fflush(stdout);
    if (!gate.ok) ++failures;
  }
  std::printf("acceptance: %zu/%zu criteria passed\n", entries.size() - failures,
              entries.size());
  return failures == 0 ? 0 : 1;
}
