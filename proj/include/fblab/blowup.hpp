#pragma once
// Blow-up rescaling around free boundary points, convergence metrics, the
// linearized one-phase limit with lambda0, and the Weiss / ACF monitors.

#include <optional>
#include <vector>

#include "fblab/fbgeom.hpp"
#include "fblab/field.hpp"
#include "fblab/grid.hpp"
#include "fblab/solve.hpp"

namespace fblab {

struct BlowupSequence {
  double x0 = 0.0, y0 = 0.0;
  std::vector<double> rhos;    // rho_k = rho0 * 2^-k
  std::vector<Field> fields;   // all on one shared target grid
  std::vector<double> sup_diff;   // sup |u_k - u_{k+1}|, size K
  std::vector<double> hausdorff;  // d_H(Gamma_k, Gamma_{k+1}), size K
};

// Shared target grid for rescaled fields: [-1,1]^n, 129 nodes per axis in 2D,
// 257 in 1D.
Grid default_blowup_grid(int dim);

// u_rho(x) = u(x0 + rho x) / rho sampled on the target grid; throws when the
// rescaled stencil leaves the source mask.
Field rescale(const Field& u, double x0, double y0, double rho, const Grid& target);

BlowupSequence blowup_sequence(const Field& u, double x0, double y0, double rho0,
                               int K, const Grid& target);

struct AcLimitOut {
  double lambda0_lo = 0.0, lambda0_hi = 0.0;  // interval when Phi0 kinks at m2
  bool kink = false;
  double sup_gap = 0.0;    // sup |finest u_k - J0 minimizer|
  double slope_gap = 0.0;  // |alpha - sqrt(lambda0)| / sqrt(lambda0)
  double lambda0() const { return 0.5 * (lambda0_lo + lambda0_hi); }
};
AcLimitOut ac_limit_compare(const BlowupSequence& seq, const PhiSpec& phi,
                            const QField& q, double m2_of_u, const SolverConfig& cfg);

enum class WeissMode { Standard, Paper };
// Standard: r^-n bulk, r^-(n+1) boundary. Paper: the printed n=2 exponents
// (1/r^2 bulk, 1/r^4 boundary). Both keep the lambda0^2 coefficient.
double weiss_energy(const Field& u, double cx, double cy, double r, double lambda0,
                    WeissMode mode);

enum class AcfMode { NMinus2, Paper };
// N-2: denominator |x-x0|^(n-2) = 1 for n=2. Paper: |x-x0|^2 with the 3x3
// node patch at x0 excluded.
double acf_functional(const Field& u, double x0, double y0, double r, AcfMode mode);

// Max distance of Gamma cap B_r(x0) to its total-least-squares line, over r;
// nullopt when fewer than 3 points fall in the ball.
std::optional<double> flatness_measure(const FreeBoundary& fb, double x0, double y0,
                                       double r);

}  // namespace fblab
