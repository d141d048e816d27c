#pragma once
// Solvers: harmonic SOR solves, harmonic replacement, direct minimization of
// J with eps-continuation plus a sharp polish, and the self-driven lambda
// fixed point.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fblab/energy.hpp"
#include "fblab/field.hpp"
#include "fblab/grid.hpp"
#include "fblab/problem.hpp"

namespace fblab {

struct SolverConfig {
  std::vector<double> eps_schedule;  // empty = [4h, 2h, h]
  int max_outer = 400;               // descent iterations per eps stage
  int max_inner = 40;                // Armijo halvings per step
  double step_init = 1.0;
  double armijo = 1e-4;
  double grad_tol = 1e-9;
  double energy_tol = 1e-11;
  double fp_damping = 0.5;           // lambda fixed-point damping omega
  double fp_tol = 1e-5;
  unsigned seed = 12345;
  int restarts = -1;                 // -1: 8 when Phi0 is non-monotone, else 0
  bool sharp_stage = true;           // final eps = 0 descent
  bool pattern_stage = true;         // small-grid zero-set search
  double sor_tol = 1e-11;
  int sor_max_sweeps = 60000;
  double sor_omega = 0.0;            // 0 = auto from grid spacing
};

struct HistoryRow {
  int iter = 0;
  double eps = 0.0, energy = 0.0, m2 = 0.0, step = 0.0;
};

struct MinimizeResult {
  Field field;
  EnergyBreakdown breakdown;  // recomputed sharply (eps = 0) at exit
  std::vector<HistoryRow> history;
  bool converged = false;
  std::vector<double> lambda_trace;  // fixed-point solver only
  double runner_up_gap = 0.0;        // sharp-energy gap to best distinct rival
  bool restarts_disagree = false;    // rival ties in energy, differs as a field
  Field runner_up;                   // populated when restarts_disagree
  int kink_events = 0;
  std::string notes;
};

struct HarmonicStats {
  int sweeps = 0;
  double residual = 0.0;
  bool converged = false;
};

// Discrete Laplace solve; boundary nodes pinned to the datum, frozen nodes
// (optional extra flags) pinned to their incoming values.
Field solve_harmonic(const Grid& g, const Field& boundary,
                     const std::vector<std::uint8_t>* frozen = nullptr,
                     double tol = 1e-11, int max_sweeps = 60000, double omega = 0.0,
                     HarmonicStats* stats = nullptr);

// v: harmonic in the ball with trace of u; w = nodewise min(u, v).
// Throws if the ball touches boundary or exterior nodes.
std::pair<Field, Field> harmonic_replacement(const Field& u, double cx, double cy,
                                             double radius);

MinimizeResult minimize_direct(const Problem& prob, const SolverConfig& cfg,
                               const Field* init = nullptr);

MinimizeResult minimize_fixed_point(const Problem& prob, const SolverConfig& cfg);

// Alt-Caffarelli specialization Phi0(r) = lambda * r.
Field ac_solve(const Grid& g, const Field& boundary, double lambda, const QField& q,
               const SolverConfig& cfg, double lambda2 = 1.0,
               const Field* init = nullptr);

struct MinimalityReport {
  double min_gap = 0.0;
  int worst_id = -1;
};

// Random compact bump perturbations; gap = min over signs/amplitudes of
// J[u + t*phi] - J[u], sharp energies.
MinimalityReport verify_minimality(const Field& u, const Problem& prob,
                                   int n_perturbations, double amplitude,
                                   unsigned seed);

}  // namespace fblab
