#pragma once
// Hot loops behind the solvers: red-black SOR sweeps over the edge-weighted
// Laplacian plus energy/volume reductions. Every kernel has a serial
// reference form and an OpenMP form with identical semantics; the parallel
// sweep is bitwise equal to the serial one (red-black updates are
// order-independent within a color), reductions agree to rounding.

#include <cstdint>
#include <vector>

#include "fblab/energy.hpp"
#include "fblab/field.hpp"
#include "fblab/grid.hpp"

namespace fblab {

int hardware_threads();
void set_threads(int n);  // clamps to >= 1; 1 = serial everywhere
int current_threads();

struct LaplaceSystem {
  const Grid* g = nullptr;
  std::vector<std::uint8_t> pinned;  // node flags: value held fixed
  std::vector<double> diag;          // sum of incident edge coefficients
  std::vector<double> cx;            // x-edge coefficients, (nx-1) per row
  std::vector<double> cy;            // y-edge coefficients (2D only)
};

// Edge coefficients derive from clipped cell weights so that the SOR fixed
// point is exactly the stationary point of dirichlet_energy under the pins.
// Exterior nodes and zero-stencil nodes are forced into the pinned set.
LaplaceSystem build_laplace(const Grid& g, const std::vector<std::uint8_t>& pinned);

// One full red-black pass (both colors); returns sup |value change|.
double sor_sweep(const LaplaceSystem& sys, std::vector<double>& u, double omega,
                 bool parallel);

// max over unpinned nodes of |sum_e c_e (u_n - u_nb)| / diag.
double laplace_residual(const LaplaceSystem& sys, const std::vector<double>& u);

// Direct tridiagonal solve of the same system in 1D (pinned rows become
// identity); used by the pattern search where many small solves are needed.
void thomas_solve_1d(const LaplaceSystem& sys, std::vector<double>& u);

double dirichlet_energy_parallel(const Field& u);
double relaxed_m2_parallel(const Field& u, const QField& q, double lambda2, double eps);

}  // namespace fblab
