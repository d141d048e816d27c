#pragma once
// Exhaustive reference minimizers on tiny grids plus the analytic energy
// curve of the degenerating 1D family. Independent of the iterative solvers:
// one dense factorization per zero-set pattern, global minimum by
// enumeration. Enumerating zero sets covers every {+,0,-} sign pattern,
// because the signs of the free nodes are determined by the pinned solve.

#include <string>
#include <utility>
#include <vector>

#include "fblab/field.hpp"
#include "fblab/problem.hpp"

namespace fblab {

struct OracleRow {
  std::string pattern;  // one char per interior node, row-major: '+', '0', '-'
  double energy = 0.0;
  bool feasible = true;
};

struct OracleResult {
  double energy = 0.0;
  Field field;
  std::string pattern;
  std::vector<OracleRow> rows;  // every evaluated pattern, enumeration order
};

// Global minimum over all 2^n zero-set patterns on the interior nodes of a
// 1D problem (n <= 12). Each pattern pins its nodes to zero and solves the
// Dirichlet system exactly; fields whose sign structure makes the sharp
// volume term locally variable (strictly mixed-sign cells) get an additional
// descent polish before ranking.
OracleResult oracle_minimize_1d(const Problem& prob);

// Same enumeration on a 2D rectangle with at most 9 interior nodes.
OracleResult oracle_minimize_2d_tiny(const Problem& prob);

// (delta, 1/(1-delta) + Phi0(1-delta)) for the piecewise nonlinearity with
// the value jump at 1. delta in [0, 1); delta = 0 lands on the jump value.
std::vector<std::pair<double, double>> oracle_energy_curve_nonexistence(
    const std::vector<double>& deltas);

}  // namespace fblab
