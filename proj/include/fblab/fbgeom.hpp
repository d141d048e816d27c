#pragma once
// Free-boundary extraction and the measure-theoretic diagnostics: one-sided
// slopes, Bernoulli residuals, subharmonicity, nondegeneracy, clean balls,
// growth constants, Laplacian-of-u+ mass, perimeter, phase separation.

#include <array>
#include <vector>

#include "fblab/energy.hpp"
#include "fblab/field.hpp"
#include "fblab/phi.hpp"

namespace fblab {

struct FBPoint {
  double x = 0.0, y = 0.0;
  double nx = 0.0, ny = 0.0;  // unit normal into {u <= 0}
  double alpha = 0.0, beta = 0.0;
  bool alpha_ok = false, beta_ok = false;
  double residual = 0.0;
};

struct FreeBoundary {
  std::vector<FBPoint> points;                  // segment midpoints (1D: crossings)
  std::vector<std::array<double, 4>> segments;  // x1,y1,x2,y2 (2D only)
  bool empty() const { return points.empty(); }
};

struct DensityReport {
  std::vector<double> radii;
  std::vector<double> min_volume_fraction;  // per radius, over sampled centers
  std::vector<double> min_nondeg_ratio;     // per radius
  std::vector<double> max_clean_c1;         // per radius
  std::vector<double> min_clean_c1;
};

FreeBoundary extract_free_boundary(const Field& u);

struct SlopePair {
  double alpha = 0.0, beta = 0.0;
  bool alpha_ok = false, beta_ok = false;
};
// Least-squares through-origin slopes along -normal (alpha, positive phase)
// and +normal (beta, sign-flipped so beta >= 0 on a genuine negative phase).
SlopePair one_sided_slopes(const Field& u, double px, double py, double nx, double ny,
                           const std::vector<double>& offsets);

struct BernoulliStats {
  double median = 0.0;
  double p90 = 0.0;
  int count = 0;
};
// Residuals |alpha^2 - beta^2 - Lambda(p)| / max(Lambda, 1) with the
// self-driven Lambda built from this very field's sharp volumes; at Phi0
// kinks the residual is the distance to the [Lambda-, Lambda+] interval.
// Fills per-point slopes and residuals into fb.
BernoulliStats bernoulli_residuals(const Field& u, FreeBoundary& fb, const PhiSpec& phi,
                                   const QField& q);

struct SubharmonicityOut {
  double max_defect = 0.0;  // u(center) - ball mean, worst sample
  double x = 0.0, y = 0.0, r = 0.0;
};
SubharmonicityOut subharmonicity_defect(const Field& u, int n_samples,
                                        const std::vector<double>& radii,
                                        unsigned seed = 20240801u);

// min over free-boundary points and radii of  mean_{B_r cap {u>0}}(u^2) / r^2.
double nondegeneracy_scan(const Field& u, const FreeBoundary& fb,
                          const std::vector<double>& radii,
                          DensityReport* report = nullptr);

struct CleanBallOut {
  double max_c1 = 0.0;  // best inscribed-ball ratio seen
  double min_c1 = 0.0;  // worst over sampled centers/radii
  double min_volume_fraction = 1.0;
};
// Largest ball inside B_r(x0) cap {u>0} via Euclidean distance transform on
// the positive-phase node mask, ratio to r; plus positive volume fraction.
CleanBallOut clean_ball_scan(const Field& u, const FreeBoundary& fb,
                             const std::vector<double>& radii,
                             DensityReport* report = nullptr);

struct GrowthOut {
  double c_sup = 0.0;  // max u(x)/dist(x, Gamma)
  double c_inf = 0.0;  // min over accepted probes
  int probes_used = 0;
};
GrowthOut growth_bounds(const Field& u, const FreeBoundary& fb,
                        const std::vector<std::array<double, 2>>& probes);
GrowthOut growth_bounds_random(const Field& u, const FreeBoundary& fb, int n_probes,
                               unsigned seed = 4242u);

struct DeltaUplusOut {
  double bulk = 0.0;        // sum over B_r of discrete Laplacian of u+ times h^n
  double flux = 0.0;        // flux of grad u+ through the ball boundary
  double grad_bound = 0.0;  // (1/r) * integral_{B_2r} |grad u+|
};
DeltaUplusOut delta_uplus_measure(const Field& u, double cx, double cy, double r);

// Polyline length of Gamma inside the ball (1D: crossing count).
double perimeter_estimate(const FreeBoundary& fb, double cx, double cy, double r);

struct PhaseSeparationOut {
  bool pass = true;
  int worst_node = -1;
  int flagged = 0;
};
// Flags {u=0} plateau nodes that touch the negative phase with no positive
// node within two cells.
PhaseSeparationOut phase_separation_check(const Field& u);

// (integral of bar-u+ over the domain boundary)^2 /
// (C * (C * J + 2 * sup * integral)); zero boundary mass gives 0.
double varpi_lower_bound(double boundary_integral_uplus, double sup_uplus,
                         double j_of_ubar, double c_omega);

// (r, (1/r) * mean_{B_r(x0)} u^-) per radius.
std::vector<std::pair<double, double>> degeneracy_indicator(
    const Field& u, double x0, double y0, const std::vector<double>& radii);

// Exact squared Euclidean distance transform (node units) to the nearest
// node where keep=0; exposed for tests.
std::vector<double> squared_distance_transform(const Grid& g,
                                               const std::vector<std::uint8_t>& keep);

}  // namespace fblab
