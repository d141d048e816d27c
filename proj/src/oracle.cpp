#include "fblab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "fblab/energy.hpp"

namespace fblab {

namespace {

// Dense Cholesky for the tiny per-pattern systems (n <= 12). In-place on a
// row-major copy; the Dirichlet form restricted to free nodes is SPD as long
// as the boundary ring is pinned, which the grid builders guarantee.
std::vector<double> spd_solve(std::vector<double> a, std::vector<double> b) {
  const int n = (int)b.size();
  for (int k = 0; k < n; ++k) {
    double d = a[k * n + k];
    for (int j = 0; j < k; ++j) d -= a[k * n + j] * a[k * n + j];
    if (!(d > 0.0)) throw std::runtime_error("oracle: pattern system not SPD");
    const double l = std::sqrt(d);
    a[k * n + k] = l;
    for (int i = k + 1; i < n; ++i) {
      double s = a[i * n + k];
      for (int j = 0; j < k; ++j) s -= a[i * n + j] * a[k * n + j];
      a[i * n + k] = s / l;
    }
  }
  for (int i = 0; i < n; ++i) {
    double s = b[i];
    for (int j = 0; j < i; ++j) s -= a[i * n + j] * b[j];
    b[i] = s / a[i * n + i];
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= a[j * n + i] * b[j];
    b[i] = s / a[i * n + i];
  }
  return b;
}

struct PairTerm {
  int p, q;   // node indices
  double k;  // energy contribution k * (u_p - u_q)^2
};

// The edge pairs of the Dirichlet sum, cell by cell, matching
// dirichlet_energy exactly.
std::vector<PairTerm> dirichlet_pairs(const Grid& g) {
  std::vector<PairTerm> out;
  if (g.dim == 1) {
    for (int i = 0; i + 1 < g.nx; ++i) {
      const double cw = g.cell_weight[i];
      if (cw > 0.0) out.push_back({i, i + 1, cw / g.h});
    }
    return out;
  }
  for (int j = 0; j + 1 < g.ny; ++j)
    for (int i = 0; i + 1 < g.nx; ++i) {
      const double cw = g.cell_weight[g.cell_index(i, j)];
      if (cw == 0.0) continue;
      const int a = g.node_index(i, j), b = g.node_index(i + 1, j);
      const int c = g.node_index(i, j + 1), d = g.node_index(i + 1, j + 1);
      out.push_back({a, b, 0.5 * cw});
      out.push_back({c, d, 0.5 * cw});
      out.push_back({a, c, 0.5 * cw});
      out.push_back({b, d, 0.5 * cw});
    }
  return out;
}

bool has_mixed_cell(const Field& u) {
  const Grid& g = u.grid;
  if (g.dim == 1) {
    for (int i = 0; i + 1 < g.nx; ++i)
      if (g.cell_weight[i] > 0.0 &&
          std::min(u.v[i], u.v[i + 1]) < 0.0 && std::max(u.v[i], u.v[i + 1]) > 0.0)
        return true;
    return false;
  }
  for (int j = 0; j + 1 < g.ny; ++j)
    for (int i = 0; i + 1 < g.nx; ++i) {
      if (g.cell_weight[g.cell_index(i, j)] == 0.0) continue;
      const double a = u.at(i, j), b = u.at(i + 1, j);
      const double c = u.at(i, j + 1), d = u.at(i + 1, j + 1);
      const double lo = std::min(std::min(a, b), std::min(c, d));
      const double hi = std::max(std::max(a, b), std::max(c, d));
      if (lo < 0.0 && hi > 0.0) return true;
    }
  return false;
}

double sharp_total(const Field& u, const Problem& prob, const PhiSpec& phi) {
  return total_energy(u, prob.q, phi, 0.0).total;
}

// Steepest-descent polish of the sharp energy on the interior nodes. Only
// reached when a strictly mixed-sign cell makes the volume term vary with
// the crossing position; the pinned Dirichlet solve is already exact
// otherwise.
void polish_mixed(Field& u, const Problem& prob, const PhiSpec& phi, double& energy) {
  const Grid& g = u.grid;
  std::vector<double> gd, gv, dir(g.num_nodes(), 0.0);
  double t = 1.0;
  for (int it = 0; it < 400; ++it) {
    const double m2 = weighted_volume_m2(u, prob.q, phi.lambda2, 0.0);
    double dphi = phi.dphi0(m2).value();
    dphi = std::clamp(dphi, -1e12, 1e12);
    dirichlet_gradient(u, gd);
    sharp_volume_gradient(u, prob.q, phi.lambda2, gv);
    double g2 = 0.0;
    for (int idx = 0; idx < g.num_nodes(); ++idx) {
      dir[idx] = g.mask[idx] == NodeClass::Interior ? gd[idx] + dphi * gv[idx] : 0.0;
      g2 += dir[idx] * dir[idx];
    }
    if (g2 <= 1e-24 * (1.0 + energy * energy)) return;
    Field trial = u;
    bool accepted = false;
    t = std::min(t * 2.0, 1e3);
    for (int half = 0; half < 50; ++half) {
      for (int idx = 0; idx < g.num_nodes(); ++idx)
        trial.v[idx] = u.v[idx] - t * dir[idx];
      const double e = sharp_total(trial, prob, phi);
      if (e <= energy - 1e-4 * t * g2) {
        u = trial;
        energy = e;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) return;  // stalled at a kink of the sharp volume
  }
}

OracleResult enumerate_patterns(const Problem& prob, int max_interior) {
  const Grid& g = prob.grid;
  std::vector<int> interior;
  for (int idx = 0; idx < g.num_nodes(); ++idx)
    if (g.mask[idx] == NodeClass::Interior) interior.push_back(idx);
  const int n = (int)interior.size();
  if (n > max_interior)
    throw std::invalid_argument("oracle: too many interior nodes for enumeration");

  const PhiSpec phi = prob.phi0();
  const std::vector<PairTerm> pairs = dirichlet_pairs(g);
  std::vector<int> slot(g.num_nodes(), -1);

  OracleResult best;
  best.energy = std::numeric_limits<double>::infinity();
  best.rows.reserve(std::size_t{1} << n);

  for (std::uint32_t pat = 0; pat < (std::uint32_t{1} << n); ++pat) {
    // Free slots for this zero set.
    std::fill(slot.begin(), slot.end(), -1);
    int nf = 0;
    for (int t = 0; t < n; ++t)
      if (!(pat & (std::uint32_t{1} << t))) slot[interior[t]] = nf++;

    Field u = prob.datum;
    for (int idx = 0; idx < g.num_nodes(); ++idx)
      if (g.mask[idx] == NodeClass::Exterior) u.v[idx] = 0.0;
    for (int t = 0; t < n; ++t)
      if (pat & (std::uint32_t{1} << t)) u.v[interior[t]] = 0.0;

    if (nf > 0) {
      std::vector<double> A(nf * nf, 0.0), rhs(nf, 0.0);
      for (const PairTerm& e : pairs) {
        const int sp = slot[e.p], sq = slot[e.q];
        if (sp >= 0) {
          A[sp * nf + sp] += e.k;
          if (sq >= 0)
            A[sp * nf + sq] -= e.k;
          else
            rhs[sp] += e.k * u.v[e.q];
        }
        if (sq >= 0) {
          A[sq * nf + sq] += e.k;
          if (sp >= 0)
            A[sq * nf + sp] -= e.k;
          else
            rhs[sq] += e.k * u.v[e.p];
        }
      }
      const std::vector<double> x = spd_solve(std::move(A), std::move(rhs));
      for (int idx = 0; idx < g.num_nodes(); ++idx)
        if (slot[idx] >= 0) u.v[idx] = x[slot[idx]];
    }

    double energy = sharp_total(u, prob, phi);
    if (has_mixed_cell(u)) polish_mixed(u, prob, phi, energy);

    std::string realized(n, '0');
    for (int t = 0; t < n; ++t) {
      const double v = u.v[interior[t]];
      if (!(pat & (std::uint32_t{1} << t)))
        realized[t] = v > 0.0 ? '+' : (v < 0.0 ? '-' : '0');
    }
    best.rows.push_back({realized, energy, true});
    if (energy < best.energy) {
      best.energy = energy;
      best.field = u;
      best.pattern = realized;
    }
  }
  return best;
}

}  // namespace

OracleResult oracle_minimize_1d(const Problem& prob) {
  if (prob.grid.dim != 1)
    throw std::invalid_argument("oracle_minimize_1d: 1D problems only");
  return enumerate_patterns(prob, 12);
}

OracleResult oracle_minimize_2d_tiny(const Problem& prob) {
  if (prob.grid.dim != 2 || prob.grid.shape != DomainShape::Rectangle)
    throw std::invalid_argument("oracle_minimize_2d_tiny: 2D rectangles only");
  return enumerate_patterns(prob, 9);
}

std::vector<std::pair<double, double>> oracle_energy_curve_nonexistence(
    const std::vector<double>& deltas) {
  const PhiSpec phi = PhiSpec::nonexistence();
  std::vector<std::pair<double, double>> out;
  out.reserve(deltas.size());
  for (double d : deltas) {
    if (!(d >= 0.0 && d < 1.0))
      throw std::invalid_argument("oracle_energy_curve_nonexistence: delta in [0,1)");
    out.emplace_back(d, 1.0 / (1.0 - d) + phi.phi0(1.0 - d));
  }
  return out;
}

}  // namespace fblab
