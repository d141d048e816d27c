#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "fblab/blowup.hpp"
#include "fblab/fbgeom.hpp"
#include "fblab/field.hpp"
#include "fblab/grid.hpp"
#include "fblab/solve.hpp"

using namespace fblab;

TEST_CASE("target grids for rescaling") {
  Grid t1 = default_blowup_grid(1);
  CHECK(t1.dim == 1);
  CHECK(t1.nx == 257);
  CHECK(t1.x(0) == doctest::Approx(-1.0));
  CHECK(t1.x(256) == doctest::Approx(1.0));
  Grid t2 = default_blowup_grid(2);
  CHECK(t2.dim == 2);
  CHECK(t2.nx == 129);
  CHECK(t2.ny == 129);
}

TEST_CASE("rescaling a 1-homogeneous field is exact") {
  Grid g1 = make_interval(257, -1.0, 1.0);
  Field u1 = sample_field(g1, [](double x, double) { return 1.5 * std::max(x, 0.0); });
  Grid t1 = default_blowup_grid(1);
  Field r1 = rescale(u1, 0.0, 0.0, 0.25, t1);
  for (int i = 0; i < t1.nx; ++i)
    CHECK(std::abs(r1.at(i) - 1.5 * std::max(t1.x(i), 0.0)) <= 1e-12);

  Grid g2 = make_rectangle(129, 129, -1.0, -1.0, 1.0, 1.0);
  Field u2 = sample_field(g2, [](double x, double) { return 1.2 * std::max(x, 0.0); });
  Grid t2 = default_blowup_grid(2);
  Field r2 = rescale(u2, 0.0, 0.0, 0.5, t2);
  for (int j = 0; j < t2.ny; j += 8)
    for (int i = 0; i < t2.nx; i += 8)
      CHECK(std::abs(r2.at(i, j) - 1.2 * std::max(t2.x(i), 0.0)) <= 1e-12);

  CHECK_THROWS_AS(rescale(u2, 0.0, 0.0, -0.5, t2), std::invalid_argument);
  // rho = 3 pushes the stencil outside the source mask.
  CHECK_THROWS(rescale(u2, 0.0, 0.0, 3.0, t2));
}

TEST_CASE("blow-up sequence of an exact cone is constant") {
  Grid g = make_rectangle(129, 129, -1.0, -1.0, 1.0, 1.0);
  Field u = sample_field(g, [](double x, double) { return 1.2 * std::max(x, 0.0); });
  Grid t = default_blowup_grid(2);
  BlowupSequence seq = blowup_sequence(u, 0.0, 0.0, 0.5, 2, t);
  REQUIRE(seq.fields.size() == 3);
  REQUIRE(seq.rhos.size() == 3);
  CHECK(seq.rhos[2] == doctest::Approx(0.125));
  REQUIRE(seq.sup_diff.size() == 2);
  CHECK(seq.sup_diff[0] <= 1e-12);
  CHECK(seq.sup_diff[1] <= 1e-12);
  CHECK(seq.hausdorff[0] <= 1e-12);
  CHECK(seq.hausdorff[1] <= 1e-12);

  // Center must track the free boundary; scales must stay above the noise floor.
  CHECK_THROWS_AS(blowup_sequence(u, 0.5, 0.5, 0.5, 2, t), std::invalid_argument);
  CHECK_THROWS_AS(blowup_sequence(u, 0.0, 0.0, 0.5, 8, t), std::invalid_argument);
  CHECK_THROWS_AS(blowup_sequence(u, 0.0, 0.0, 0.5, -1, t), std::invalid_argument);
}

TEST_CASE("linearized limit: lambda0 from the slope balance") {
  Grid g = make_interval(257, -1.0, 1.0);
  const double lam = 2.25;  // alpha = 1.5 satisfies alpha^2 = lambda0
  Field u = sample_field(g, [lam](double x, double) {
    return std::sqrt(lam) * std::max(x, 0.0);
  });
  Grid t = default_blowup_grid(1);
  BlowupSequence seq = blowup_sequence(u, 0.0, 0.0, 0.5, 2, t);
  QField q = QField::uniform(1.0);
  SolverConfig cfg;
  const double m2 = weighted_volume_m2(u, q, 1.0, 0.0);

  AcLimitOut out = ac_limit_compare(seq, PhiSpec::linear(lam), q, m2, cfg);
  CHECK(!out.kink);
  CHECK(out.lambda0() == doctest::Approx(lam).epsilon(1e-12));
  CHECK(out.sup_gap <= 0.05);
  CHECK(out.slope_gap <= 0.05);

  // A kink at the realized volume widens lambda0 into an interval.
  PhiSpec tab = PhiSpec::tabulated({{0.0, 0.0}, {1.0, 1.0}, {2.0, 4.0}});
  AcLimitOut ko = ac_limit_compare(seq, tab, q, 1.0, cfg);
  CHECK(ko.kink);
  CHECK(ko.lambda0_lo == doctest::Approx(1.0));
  CHECK(ko.lambda0_hi == doctest::Approx(3.0));

  CHECK_THROWS_AS(ac_limit_compare(seq, PhiSpec::linear(0.0), q, m2, cfg),
                  std::invalid_argument);
}

TEST_CASE("Weiss density: scale-free on the exact one-phase cone") {
  Grid g = make_rectangle(129, 129, -1.0, -1.0, 1.0, 1.0);
  const double lam0 = 1.69;  // slope 1.3
  Field u = sample_field(g, [lam0](double x, double) {
    return std::sqrt(lam0) * std::max(x, 0.0);
  });
  const double exact = M_PI / 2 * lam0 * lam0;
  // Measured defects at h = 1/64: 1.2e-2 (r=0.3), 2.4e-2 (r=0.5).
  for (double r : {0.3, 0.5}) {
    double w = weiss_energy(u, 0.0, 0.0, r, lam0, WeissMode::Standard);
    CHECK(std::abs(w - exact) <= 5.0 * g.h);
  }
  // The printed-exponent mode is not scale-free on the same field.
  double p3 = weiss_energy(u, 0.0, 0.0, 0.3, lam0, WeissMode::Paper);
  double p5 = weiss_energy(u, 0.0, 0.0, 0.5, lam0, WeissMode::Paper);
  CHECK(std::abs(p3 - p5) > 0.5);

  Grid g1 = make_interval(65, 0.0, 1.0);
  Field u1 = sample_field(g1, [](double x, double) { return x; });
  CHECK_THROWS_AS(weiss_energy(u1, 0.5, 0.0, 0.1, 1.0, WeissMode::Standard),
                  std::invalid_argument);
  CHECK_THROWS_AS(weiss_energy(u, 0.0, 0.0, 1.5, lam0, WeissMode::Standard),
                  std::invalid_argument);
}

TEST_CASE("ACF product: plane value alpha^2 beta^2 pi^2/4 within one percent") {
  Grid g = make_rectangle(129, 129, -1.0, -1.0, 1.0, 1.0);
  Field u = sample_field(g, [](double x, double) { return x > 0 ? 2.0 * x : 1.5 * x; });
  const double exact = 4.0 * 2.25 * M_PI * M_PI / 4.0;
  for (double r : {0.3, 0.5}) {
    double a = acf_functional(u, 0.0, 0.0, r, AcfMode::NMinus2);
    CHECK(std::abs(a / exact - 1.0) <= 0.01);
  }
  // The printed-denominator mode weights the core differently.
  double ap = acf_functional(u, 0.0, 0.0, 0.4, AcfMode::Paper);
  double an = acf_functional(u, 0.0, 0.0, 0.4, AcfMode::NMinus2);
  CHECK(ap > 0.0);
  CHECK(std::abs(ap - an) > 0.05 * an);
}

TEST_CASE("flatness: collinear interfaces are flat, crossings are not") {
  Grid g = make_rectangle(65, 65, -1.0, -1.0, 1.0, 1.0);
  Field plane = sample_field(g, [](double x, double) { return x - 0.015; });
  FreeBoundary fbp = extract_free_boundary(plane);
  auto fp = flatness_measure(fbp, 0.015, 0.0, 0.4);
  REQUIRE(fp.has_value());
  CHECK(*fp <= 1e-9);

  Field xy = sample_field(g, [](double x, double y) { return x * y; });
  FreeBoundary fbx = extract_free_boundary(xy);
  auto fx = flatness_measure(fbx, 0.0, 0.0, 0.4);
  REQUIRE(fx.has_value());
  CHECK(*fx >= 0.5);

  // Fewer than three points in the ball: no estimate.
  auto fn = flatness_measure(fbp, 0.015, 0.0, 0.02);
  CHECK(!fn.has_value());
}
