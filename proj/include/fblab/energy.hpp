#pragma once
// Discrete energy: Dirichlet term, weighted phase volumes (sharp and smoothed),
// and the assembled breakdown J = D + Phi0(M2).

#include <functional>
#include <vector>

#include "fblab/field.hpp"
#include "fblab/grid.hpp"
#include "fblab/phi.hpp"

namespace fblab {

struct QField {
  bool constant = true;
  double value = 1.0;
  std::vector<double> values;  // per-node when !constant
  double q1 = 1.0, q2 = 1.0;   // 0 < q1 <= Q <= q2

  double at(int idx) const { return constant ? value : values[idx]; }

  static QField uniform(double v);
  static QField per_node(const Grid& g, const std::function<double(double, double)>& f);
};

// Weighted measure of the domain, lambda_Omega = sum h^n * Q, cell-based
// (clipped cells count fractionally; Q averaged over cell corners).
double lambda_omega(const Grid& g, const QField& Q);

// Edge-based Dirichlet sum: per cell, the mean of squared differences along
// each axis times the clipped cell measure. Exact on affine fields, zero only
// on fields constant per mask component (no checkerboard null mode).
double dirichlet_energy(const Field& u);

// grad[i] = d(dirichlet_energy)/d(u[i]); exterior and nan-safe (exterior = 0).
void dirichlet_gradient(const Field& u, std::vector<double>& grad);

// Positive fraction of a 1D cell under linear interpolation of endpoint
// values; exact crossing, zero values count as nonpositive-phase boundary.
double cell_positive_fraction_1d(double a, double b);
// Same for a 2D cell, corners (a,b; c,d) = (SW,SE; NW,NE): fan split into four
// triangles around the corner average, exact linear clipping per triangle.
// Complement-consistent: frac(u) + frac(-u) = 1 away from fat zero sets.
double cell_positive_fraction_2d(double a, double b, double c, double d);

// eps = 0: sharp cell-based measure of {interpolant > 0} with exact crossings.
// eps > 0: node-based smoothed sum  lambda2 * sum node_weight * Q * H_eps(u).
double weighted_volume_m2(const Field& u, const QField& Q, double lambda2, double eps);

// Gradient of the eps > 0 volume term (piecewise constant in u, Q/eps on the
// transition band).
void relaxed_volume_gradient(const Field& u, const QField& Q, double lambda2,
                             double eps, std::vector<double>& grad);
// Numeric gradient of the sharp (eps = 0) volume, nonzero only on cells whose
// interpolant changes sign; used by the final descent stage.
void sharp_volume_gradient(const Field& u, const QField& Q, double lambda2,
                           std::vector<double>& grad);

double weighted_volume_m1(double m2, double lambda1, double lambda2, double lam_omega);

struct EnergyBreakdown {
  double dirichlet = 0.0;
  double m2 = 0.0;
  double m1 = 0.0;
  double volume_term = 0.0;
  double total = 0.0;
  double eps = 0.0;
};

EnergyBreakdown total_energy(const Field& u, const QField& Q, const PhiSpec& phi,
                             double eps);

// PhiSpec copy with lambda_omega filled in from the grid (the two-argument
// families need it to reduce to Phi0).
PhiSpec attach_domain(const PhiSpec& phi, const Grid& g, const QField& Q);

}  // namespace fblab
