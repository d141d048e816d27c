#include "fblab/solve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "fblab/kernels.hpp"

namespace fblab {

namespace {

double grid_extent(const Grid& g) {
  if (g.dim == 1) return (g.nx - 1) * g.h;
  return std::max((g.nx - 1) * g.h, (g.ny - 1) * g.h);
}

double auto_omega(const Grid& g) {
  const double x = std::numbers::pi * g.h / grid_extent(g);
  return std::min(1.97, 2.0 / (1.0 + std::sin(x)));
}

double sup_abs(const Field& u) {
  double m = 0.0;
  for (int idx = 0; idx < u.grid.num_nodes(); ++idx)
    if (u.grid.mask[idx] != NodeClass::Exterior) m = std::max(m, std::abs(u.v[idx]));
  return m;
}

double sup_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (int idx = 0; idx < a.grid.num_nodes(); ++idx)
    if (a.grid.mask[idx] != NodeClass::Exterior)
      m = std::max(m, std::abs(a.v[idx] - b.v[idx]));
  return m;
}

void pin_datum(Field& u, const Problem& pr) {
  for (int idx = 0; idx < u.grid.num_nodes(); ++idx) {
    if (u.grid.mask[idx] == NodeClass::Boundary) u.v[idx] = pr.datum.v[idx];
    if (u.grid.mask[idx] == NodeClass::Exterior) u.v[idx] = 0.0;
  }
}

}  // namespace

Field solve_harmonic(const Grid& g, const Field& boundary,
                     const std::vector<std::uint8_t>* frozen, double tol,
                     int max_sweeps, double omega, HarmonicStats* stats) {
  std::vector<std::uint8_t> pin(g.num_nodes(), 0);
  for (int idx = 0; idx < g.num_nodes(); ++idx) {
    if (g.mask[idx] == NodeClass::Boundary) pin[idx] = 1;
    if (frozen && (*frozen)[idx]) pin[idx] = 1;
  }
  LaplaceSystem sys = build_laplace(g, pin);
  Field u = boundary;
  for (int idx = 0; idx < g.num_nodes(); ++idx)
    if (g.mask[idx] == NodeClass::Exterior) u.v[idx] = 0.0;
  const double om = omega > 0.0 ? omega : auto_omega(g);
  const double scale = 1.0 + sup_abs(u);
  const bool par = current_threads() > 1;
  double res = std::numeric_limits<double>::infinity();
  int s = 0;
  while (s < max_sweeps) {
    const double ch = sor_sweep(sys, u.v, om, par);
    ++s;
    if (ch <= 0.05 * tol * scale || s % 16 == 0) {
      res = laplace_residual(sys, u.v);
      if (res <= tol * scale) break;
    }
  }
  if (!std::isfinite(res) || res > tol * scale) res = laplace_residual(sys, u.v);
  if (stats) {
    stats->sweeps = s;
    stats->residual = res;
    stats->converged = res <= tol * scale;
  }
  return u;
}

std::pair<Field, Field> harmonic_replacement(const Field& u, double cx, double cy,
                                             double radius) {
  const Grid& g = u.grid;
  if (!(radius > 0.0)) throw std::invalid_argument("harmonic_replacement: radius must be > 0");
  std::vector<std::uint8_t> pin(g.num_nodes(), 1);
  int inside = 0;
  for (int j = 0; j < (g.dim == 2 ? g.ny : 1); ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double dx = g.x(i) - cx;
      const double dy = g.dim == 2 ? g.y(j) - cy : 0.0;
      if (dx * dx + dy * dy >= radius * radius) continue;
      const int idx = g.node_index(i, j);
      if (g.mask[idx] != NodeClass::Interior)
        throw std::invalid_argument("harmonic_replacement: ball crosses boundary or exterior");
      pin[idx] = 0;
      ++inside;
    }
  }
  Field v = u;
  if (inside > 0) {
    LaplaceSystem sys = build_laplace(g, pin);
    if (g.dim == 1) {
      thomas_solve_1d(sys, v.v);
    } else {
      const double om = auto_omega(g);
      const double scale = 1.0 + sup_abs(u);
      for (int s = 0; s < 60000; ++s) {
        sor_sweep(sys, v.v, om, current_threads() > 1);
        if (s % 16 == 15 && laplace_residual(sys, v.v) <= 1e-12 * scale) break;
      }
    }
  }
  Field w = u;
  for (int idx = 0; idx < g.num_nodes(); ++idx)
    if (g.mask[idx] != NodeClass::Exterior) w.v[idx] = std::min(u.v[idx], v.v[idx]);
  return {v, w};
}

namespace {

// Stage objective: relaxed (eps > 0) or sharp (eps = 0) energy.
struct Objective {
  const Problem* pr = nullptr;
  PhiSpec ph;  // lambda_omega attached
  double eps = 0.0;
  int* kinks = nullptr;

  double m2_of(const Field& u) const {
    return eps > 0.0 ? relaxed_m2_parallel(u, pr->q, ph.lambda2, eps)
                     : weighted_volume_m2(u, pr->q, ph.lambda2, 0.0);
  }
  double value(const Field& u) const {
    const double d = current_threads() > 1 ? dirichlet_energy_parallel(u)
                                           : dirichlet_energy(u);
    return d + ph.phi0(m2_of(u));
  }
  void grad(const Field& u, std::vector<double>& gr, std::vector<double>& tmp) const {
    dirichlet_gradient(u, gr);
    const PhiDeriv d = ph.dphi0(m2_of(u));
    if (d.kink && kinks) ++*kinks;
    double w = d.right;  // right derivative at kinks by convention
    if (!std::isfinite(w)) w = w > 0.0 ? 1e12 : -1e12;
    if (w == 0.0) return;
    if (eps > 0.0)
      relaxed_volume_gradient(u, pr->q, ph.lambda2, eps, tmp);
    else
      sharp_volume_gradient(u, pr->q, ph.lambda2, tmp);
    for (size_t i = 0; i < gr.size(); ++i) gr[i] += w * tmp[i];
  }
};

struct StageOut {
  bool converged = false;
  bool stalled = false;  // Armijo failure: nonsmooth point, typically the optimum
};

StageOut descent_stage(Field& u, const Objective& ob, const std::vector<std::uint8_t>& pin,
                       const SolverConfig& cfg, double eps_label, int& iter_counter,
                       std::vector<HistoryRow>& rows) {
  std::vector<double> gr, tmp, gprev, uprev;
  double E = ob.value(u);
  rows.push_back({iter_counter, eps_label, E, ob.m2_of(u), 0.0});
  double step = cfg.step_init;
  int flat = 0;
  Field trial = u;
  for (int k = 0; k < cfg.max_outer; ++k) {
    ob.grad(u, gr, tmp);
    for (size_t i = 0; i < gr.size(); ++i)
      if (pin[i]) gr[i] = 0.0;
    double g2 = 0.0, ginf = 0.0;
    for (double v : gr) {
      g2 += v * v;
      ginf = std::max(ginf, std::abs(v));
    }
    if (ginf <= cfg.grad_tol * (1.0 + std::abs(E))) return {true, false};
    if (!uprev.empty()) {
      double ss = 0.0, sy = 0.0;
      for (size_t i = 0; i < gr.size(); ++i) {
        const double s = u.v[i] - uprev[i];
        const double y = gr[i] - gprev[i];
        ss += s * s;
        sy += s * y;
      }
      if (sy > 1e-300) step = std::clamp(ss / sy, 1e-8, 1e3);
    }
    uprev = u.v;
    gprev = gr;
    double t = step;
    bool ok = false;
    double Enew = E;
    for (int half = 0; half < cfg.max_inner; ++half) {
      for (size_t i = 0; i < gr.size(); ++i) trial.v[i] = u.v[i] - t * gr[i];
      Enew = ob.value(trial);
      if (Enew <= E - cfg.armijo * t * g2) {
        ok = true;
        break;
      }
      t *= 0.5;
    }
    if (!ok) return {false, true};
    u.v.swap(trial.v);
    ++iter_counter;
    rows.push_back({iter_counter, eps_label, Enew, ob.m2_of(u), t});
    const bool tiny = (E - Enew) <= cfg.energy_tol * (1.0 + std::abs(Enew));
    E = Enew;
    flat = tiny ? flat + 1 : 0;
    if (flat >= 3) return {true, false};
  }
  return {false, false};
}

Field pattern_solve(const Problem& pr, const std::vector<std::uint8_t>& zero,
                    const Field& warm, double tol = 1e-12);

std::vector<Field> build_seeds(const Problem& pr, const SolverConfig& cfg,
                               const Field* init, const Field& harm, bool nonmonotone) {
  const Grid& g = pr.grid;
  std::vector<Field> seeds;
  seeds.push_back(harm);
  {
    // Datum-support seed: plateau on the datum's dead zone. The harmonic seed
    // is strictly positive inside whenever the data are nonnegative somewhere,
    // so descent alone has to carve any plateau cell by cell; this seed starts
    // from the positivity pattern the boundary data already suggest.
    std::vector<std::uint8_t> z(g.num_nodes(), 0);
    int nz = 0;
    for (int idx = 0; idx < g.num_nodes(); ++idx)
      if (g.mask[idx] == NodeClass::Interior && pr.datum.v[idx] <= 0.0) {
        z[idx] = 1;
        ++nz;
      }
    if (nz > 0) seeds.push_back(pattern_solve(pr, z, harm));
  }
  if (init) {
    seeds.push_back(*init);
    pin_datum(seeds.back(), pr);
  }
  const int restarts = cfg.restarts >= 0 ? cfg.restarts : (nonmonotone ? 8 : 0);
  std::mt19937 rng(cfg.seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double amp0 = std::max(sup_abs(harm), 1e-3);
  const double ext = grid_extent(g);
  for (int r = 0; r < restarts; ++r) {
    Field f = harm;
    for (int b = 0; b < 3; ++b) {
      int ci, cj = 0;
      do {
        ci = (int)(uni(rng) * g.nx) % g.nx;
        if (g.dim == 2) cj = (int)(uni(rng) * g.ny) % g.ny;
      } while (g.mask[g.node_index(ci, cj)] == NodeClass::Exterior);
      const double bx = g.x(ci), by = g.dim == 2 ? g.y(cj) : 0.0;
      const double rad = (0.05 + 0.2 * uni(rng)) * ext;
      const double amp = (uni(rng) < 0.5 ? -1.0 : 1.0) * amp0 * (0.3 + 0.7 * uni(rng));
      for (int j = 0; j < (g.dim == 2 ? g.ny : 1); ++j) {
        for (int i = 0; i < g.nx; ++i) {
          const int idx = g.node_index(i, j);
          if (g.mask[idx] == NodeClass::Exterior) continue;
          const double dx = g.x(i) - bx;
          const double dy = g.dim == 2 ? g.y(j) - by : 0.0;
          const double rho2 = (dx * dx + dy * dy) / (rad * rad);
          if (rho2 < 1.0) f.v[idx] += amp * (1.0 - rho2) * (1.0 - rho2);
        }
      }
    }
    pin_datum(f, pr);
    seeds.push_back(std::move(f));
  }
  if (g.dim == 1) {
    // Plateau-ramp profiles: zero block against one end, linear to the other.
    const int n = g.nx;
    const double ua = pr.datum.v[0], ub = pr.datum.v[n - 1];
    std::vector<int> ks = {1, 2, 3, 4, n / 8, n / 6, n / 4, n / 3, (3 * n) / 8,
                           n / 2, (5 * n) / 8, (3 * n) / 4};
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    for (int k : ks) {
      if (k < 1 || k > n - 2) continue;
      if (ub != 0.0) {
        Field f = harm;
        for (int i = 0; i < n; ++i)
          f.v[i] = i <= k ? 0.0 : ub * (double)(i - k) / (double)(n - 1 - k);
        pin_datum(f, pr);
        seeds.push_back(std::move(f));
      }
      if (ua != 0.0) {
        Field f = harm;
        const int kk = n - 1 - k;
        for (int i = 0; i < n; ++i)
          f.v[i] = i >= kk ? 0.0 : ua * (double)(kk - i) / (double)kk;
        pin_datum(f, pr);
        seeds.push_back(std::move(f));
      }
    }
  }
  return seeds;
}

double sharp_total(const Problem& pr, const Field& u) {
  return total_energy(u, pr.q, pr.phi, 0.0).total;
}

// Harmonic solve with a prescribed interior zero set (plus the boundary pins).
Field pattern_solve(const Problem& pr, const std::vector<std::uint8_t>& zero,
                    const Field& warm, double tol) {
  const Grid& g = pr.grid;
  std::vector<std::uint8_t> pin(g.num_nodes(), 0);
  Field u = warm;
  for (int idx = 0; idx < g.num_nodes(); ++idx) {
    if (g.mask[idx] == NodeClass::Boundary) {
      pin[idx] = 1;
      u.v[idx] = pr.datum.v[idx];
    } else if (zero[idx]) {
      pin[idx] = 1;
      u.v[idx] = 0.0;
    }
  }
  LaplaceSystem sys = build_laplace(g, pin);
  if (g.dim == 1) {
    thomas_solve_1d(sys, u.v);
  } else {
    const double om = auto_omega(g);
    const double scale = 1.0 + sup_abs(warm);
    for (int s = 0; s < 60000; ++s) {
      sor_sweep(sys, u.v, om, false);
      if (s % 8 == 7 && laplace_residual(sys, u.v) <= tol * scale) break;
    }
  }
  // Quantize solver noise: released nodes whose true value is 0 come back as
  // tiny +-garbage, and the strict u>0 measure would count the positive half
  // of them as full cells. Snapping them costs O(noise^2) Dirichlet.
  const double ztol = 100.0 * tol * (1.0 + sup_abs(u));
  for (int idx = 0; idx < g.num_nodes(); ++idx)
    if (g.mask[idx] != NodeClass::Exterior && std::abs(u.v[idx]) <= ztol) u.v[idx] = 0.0;
  return u;
}

struct PatternOut {
  Field u;
  double energy = std::numeric_limits<double>::infinity();
  bool ran = false;
};

// Global zero-set search on small grids: full enumeration when 2^n is cheap,
// otherwise greedy single-node toggles seeded from snap thresholds.
PatternOut pattern_search(const Problem& pr, const Field& current, double final_eps) {
  const Grid& g = pr.grid;
  std::vector<int> interior;
  for (int idx = 0; idx < g.num_nodes(); ++idx)
    if (g.mask[idx] == NodeClass::Interior) interior.push_back(idx);
  const int n = (int)interior.size();
  PatternOut out;
  const bool enumerate = n <= 12;
  const bool climb = !enumerate && ((g.dim == 1 && g.nx <= 1100) || (g.dim == 2 && n <= 40));
  if (!enumerate && !climb) return out;
  out.ran = true;
  std::vector<std::uint8_t> zero(g.num_nodes(), 0);
  auto eval = [&](const std::vector<std::uint8_t>& z) {
    Field u = pattern_solve(pr, z, current);
    return std::make_pair(sharp_total(pr, u), std::move(u));
  };
  if (enumerate) {
    for (unsigned long mask = 0; mask < (1UL << n); ++mask) {
      std::fill(zero.begin(), zero.end(), 0);
      for (int b = 0; b < n; ++b)
        if (mask & (1UL << b)) zero[interior[b]] = 1;
      auto [e, u] = eval(zero);
      if (e < out.energy) {
        out.energy = e;
        out.u = std::move(u);
      }
    }
    return out;
  }
  // Snap seeds: thresholded zero sets of the incoming field, plus the empty set.
  std::vector<std::vector<std::uint8_t>> starts;
  starts.emplace_back(g.num_nodes(), 0);
  for (double f : {0.25, 0.5, 1.0}) {
    std::vector<std::uint8_t> z(g.num_nodes(), 0);
    const double tau = f * std::max(final_eps, 1e-12);
    for (int idx : interior)
      if (std::abs(current.v[idx]) < tau) z[idx] = 1;
    starts.push_back(std::move(z));
  }
  for (auto& z : starts) {
    auto [e, u] = eval(z);
    for (int pass = 0; pass < 4; ++pass) {
      bool improved = false;
      for (int idx : interior) {
        z[idx] ^= 1;
        auto [e2, u2] = eval(z);
        if (e2 < e - 1e-14) {
          e = e2;
          u = std::move(u2);
          improved = true;
        } else {
          z[idx] ^= 1;
        }
      }
      if (!improved) break;
    }
    if (e < out.energy) {
      out.energy = e;
      out.u = std::move(u);
    }
  }
  return out;
}

// Threshold-snap refinement for grids beyond pattern_search size. Gradient
// descent moves a free-boundary front roughly one cell per dozens of
// iterations (the terminal creep); snapping the near-zero band to an exact
// plateau and re-solving harmonically elsewhere jumps the front in one move.
// A snap is kept only when it lowers the sharp energy, so this never degrades
// the minimizer; each accepted snap is followed by a short sharp polish.
bool snap_refine(const Problem& pr, Field& u, const std::vector<std::uint8_t>& pin,
                 const SolverConfig& cfg, int& iter, std::vector<HistoryRow>& rows) {
  const Grid& g = pr.grid;
  const PhiSpec ph = pr.phi0();
  SolverConfig pcfg = cfg;
  pcfg.max_outer = std::min(cfg.max_outer, 200);
  double E = sharp_total(pr, u);
  StageOut last{true, false};
  bool capped = true;
  // Retreat moves erode the plateau only along its free boundary (neighbors
  // with u > 0), never along walls where it legitimately meets zero data.
  auto erode = [&](std::vector<std::uint8_t> z, int layers) {
    for (int pass = 0; pass < layers; ++pass) {
      std::vector<std::uint8_t> out = z;
      for (int j = 0; j < (g.dim == 2 ? g.ny : 1); ++j) {
        for (int i = 0; i < g.nx; ++i) {
          const int idx = g.node_index(i, j);
          if (!z[idx]) continue;
          bool edge = false;
          auto check = [&](int nb) {
            if (!z[nb] && g.mask[nb] != NodeClass::Exterior && u.v[nb] > 0.0) edge = true;
          };
          if (i > 0) check(g.node_index(i - 1, j));
          if (i + 1 < g.nx) check(g.node_index(i + 1, j));
          if (g.dim == 2 && j > 0) check(g.node_index(i, j - 1));
          if (g.dim == 2 && j + 1 < g.ny) check(g.node_index(i, j + 1));
          if (edge) out[idx] = 0;
        }
      }
      z.swap(out);
    }
    return z;
  };
  const double gain_tol = 1e-7;
  for (int round = 0; round < 64; ++round) {
    const double scale = 1.0 + sup_abs(u);
    const double ztol = 1e-9 * scale;
    std::vector<std::uint8_t> zcur(g.num_nodes(), 0);
    for (int idx = 0; idx < g.num_nodes(); ++idx)
      if (g.mask[idx] == NodeClass::Interior && std::abs(u.v[idx]) <= ztol) zcur[idx] = 1;
    // Candidate zero sets: value-threshold growth, pure polish, and one- and
    // two-layer erosion. Thresholds can only enlarge an exact plateau (its
    // nodes all pass any tau), so erosion is the only retreat move available.
    std::vector<std::vector<std::uint8_t>> cands;
    for (double f : {4.0, 2.0, 1.0, 0.5}) {
      const double tau = f * g.h * scale;
      std::vector<std::uint8_t> z(g.num_nodes(), 0);
      for (int idx = 0; idx < g.num_nodes(); ++idx)
        if (g.mask[idx] == NodeClass::Interior && std::abs(u.v[idx]) <= tau) z[idx] = 1;
      cands.push_back(std::move(z));
    }
    cands.push_back(zcur);
    cands.push_back(erode(zcur, 1));
    cands.push_back(erode(zcur, 2));
    double bestE = E;
    Field bestU(g);
    bool improved = false;
    for (size_t c = 0; c < cands.size(); ++c) {
      bool dup = false;
      for (size_t p = 0; p < c && !dup; ++p) dup = cands[c] == cands[p];
      if (dup) continue;
      Field v = pattern_solve(pr, cands[c], u, 1e-9);
      const double e = sharp_total(pr, v);
      if (e < bestE - 1e-12 * (1.0 + std::abs(E))) {
        bestE = e;
        bestU = std::move(v);
        improved = true;
      }
    }
    const double gain = E - bestE;
    if (improved) {
      u = std::move(bestU);
      E = bestE;
      ++iter;
      rows.push_back({iter, 0.0, E, weighted_volume_m2(u, pr.q, ph.lambda2, 0.0), 0.0});
    }
    if (!improved || gain <= gain_tol * (1.0 + std::abs(E))) {
      capped = false;
      break;
    }
    Objective ob{&pr, ph, 0.0, nullptr};
    last = descent_stage(u, ob, pin, pcfg, 0.0, iter, rows);
    E = sharp_total(pr, u);
  }
  {
    // Exact re-solve of the final pattern; the in-loop solves run loose.
    const double ztol = 1e-9 * (1.0 + sup_abs(u));
    std::vector<std::uint8_t> z(g.num_nodes(), 0);
    for (int idx = 0; idx < g.num_nodes(); ++idx)
      if (g.mask[idx] == NodeClass::Interior && std::abs(u.v[idx]) <= ztol) z[idx] = 1;
    Field v = pattern_solve(pr, z, u);
    const double e = sharp_total(pr, v);
    if (e <= E) {
      u = std::move(v);
      E = e;
      ++iter;
      rows.push_back({iter, 0.0, E, weighted_volume_m2(u, pr.q, ph.lambda2, 0.0), 0.0});
    }
  }
  return (last.converged || last.stalled) && !capped;
}

SolverConfig fill_defaults(const Problem& pr, const SolverConfig& cfg0) {
  SolverConfig cfg = cfg0;
  if (cfg.eps_schedule.empty())
    cfg.eps_schedule = {4.0 * pr.grid.h, 2.0 * pr.grid.h, pr.grid.h};
  double prev = std::numeric_limits<double>::infinity();
  for (double e : cfg.eps_schedule) {
    if (!(e > 0.0 && e < prev))
      throw std::invalid_argument("SolverConfig: eps schedule must be positive and strictly decreasing");
    prev = e;
  }
  if (!(cfg.armijo > 0.0 && cfg.armijo < 1.0))
    throw std::invalid_argument("SolverConfig: armijo constant outside (0,1)");
  if (!(cfg.grad_tol > 0.0 && cfg.energy_tol > 0.0 && cfg.fp_tol > 0.0))
    throw std::invalid_argument("SolverConfig: tolerances must be positive");
  if (!(cfg.fp_damping > 0.0 && cfg.fp_damping <= 1.0))
    throw std::invalid_argument("SolverConfig: fixed-point damping outside (0,1]");
  return cfg;
}

}  // namespace

MinimizeResult minimize_direct(const Problem& pr, const SolverConfig& cfg0,
                               const Field* init) {
  const SolverConfig cfg = fill_defaults(pr, cfg0);
  const PhiSpec ph = pr.phi0();
  const bool nonmono = !check_monotonicity(ph, ph.lambda_omega, 512).monotone;
  Field harm = solve_harmonic(pr.grid, pr.datum, nullptr, cfg.sor_tol,
                              cfg.sor_max_sweeps, cfg.sor_omega);
  pin_datum(harm, pr);
  const std::vector<Field> seeds = build_seeds(pr, cfg, init, harm, nonmono);

  std::vector<std::uint8_t> pin(pr.grid.num_nodes(), 0);
  for (int idx = 0; idx < pr.grid.num_nodes(); ++idx)
    if (pr.grid.mask[idx] != NodeClass::Interior) pin[idx] = 1;

  struct Cand {
    Field u;
    std::vector<HistoryRow> rows;
    bool converged = true;
    int kinks = 0;
    double energy = 0.0;
  };
  std::vector<Cand> pool;
  auto add = [&](Field u, std::vector<HistoryRow> rows, bool conv, int kinks) {
    Cand c;
    c.energy = sharp_total(pr, u);
    c.u = std::move(u);
    c.rows = std::move(rows);
    c.converged = conv;
    c.kinks = kinks;
    pool.push_back(std::move(c));
  };

  for (const Field& seed : seeds) {
    add(seed, {HistoryRow{0, 0.0, sharp_total(pr, seed),
                          weighted_volume_m2(seed, pr.q, ph.lambda2, 0.0), 0.0}},
        true, 0);
    Field u = seed;
    std::vector<HistoryRow> rows;
    int iter = 0, kinks = 0;
    StageOut last;
    for (double eps : cfg.eps_schedule) {
      Objective ob{&pr, ph, eps, &kinks};
      last = descent_stage(u, ob, pin, cfg, eps, iter, rows);
    }
    if (cfg.sharp_stage) {
      Objective ob{&pr, ph, 0.0, &kinks};
      last = descent_stage(u, ob, pin, cfg, 0.0, iter, rows);
    }
    add(std::move(u), std::move(rows), last.converged || last.stalled, kinks);
  }

  auto best_it = std::min_element(pool.begin(), pool.end(),
                                  [](const Cand& a, const Cand& b) { return a.energy < b.energy; });
  if (cfg.pattern_stage) {
    PatternOut po = pattern_search(pr, best_it->u, cfg.eps_schedule.back());
    if (po.ran && po.energy < best_it->energy) {
      std::vector<HistoryRow> rows = best_it->rows;
      int it = rows.empty() ? 0 : rows.back().iter + 1;
      Field pu = po.u;
      if (cfg.sharp_stage) {
        int kinks = 0;
        Objective ob{&pr, ph, 0.0, &kinks};
        std::vector<HistoryRow> prows;
        descent_stage(pu, ob, pin, cfg, 0.0, it, prows);
        if (sharp_total(pr, pu) > po.energy) pu = po.u;  // keep the better of the two
      }
      const double e = sharp_total(pr, pu);
      if (e < best_it->energy) {
        rows.push_back({it, 0.0, e, weighted_volume_m2(pu, pr.q, ph.lambda2, 0.0), 0.0});
        Cand c;
        c.energy = e;
        c.u = std::move(pu);
        c.rows = std::move(rows);
        c.converged = true;
        c.kinks = best_it->kinks;
        pool.push_back(std::move(c));
        best_it = std::prev(pool.end());
      }
    } else if (!po.ran) {
      Cand c = *best_it;
      int it = c.rows.empty() ? 0 : c.rows.back().iter + 1;
      const bool conv = snap_refine(pr, c.u, pin, cfg, it, c.rows);
      const double e = sharp_total(pr, c.u);
      if (e < best_it->energy) {
        c.energy = e;
        c.converged = conv;
        pool.push_back(std::move(c));
        best_it = std::prev(pool.end());
      }
    }
  }

  MinimizeResult res;
  res.field = best_it->u;
  res.breakdown = total_energy(res.field, pr.q, pr.phi, 0.0);
  res.history = best_it->rows;
  res.converged = best_it->converged;
  res.kink_events = best_it->kinks;

  // Rival screening: best materially different candidate.
  const double material = 0.02 * (1.0 + sup_abs(res.field));
  double rival = std::numeric_limits<double>::infinity();
  const Cand* rc = nullptr;
  for (const Cand& c : pool) {
    if (&c == &*best_it) continue;
    if (sup_diff(c.u, res.field) <= material) continue;
    if (c.energy < rival) {
      rival = c.energy;
      rc = &c;
    }
  }
  if (rc) {
    res.runner_up_gap = rival - best_it->energy;
    if (res.runner_up_gap <= 1e-4 * (1.0 + std::abs(best_it->energy))) {
      res.restarts_disagree = true;
      res.runner_up = rc->u;
      res.notes = "distinct minimizers within tolerance; both reported";
    }
  } else {
    res.runner_up_gap = std::numeric_limits<double>::infinity();
  }
  return res;
}

Field ac_solve(const Grid& g, const Field& boundary, double lambda, const QField& q,
               const SolverConfig& cfg, double lambda2, const Field* init) {
  if (lambda < 0.0) throw std::invalid_argument("ac_solve: lambda must be >= 0");
  Problem pr{g, boundary, q, PhiSpec::linear(lambda, lambda2)};
  SolverConfig c = cfg;
  c.restarts = 0;
  MinimizeResult r = minimize_direct(pr, c, init);
  return r.field;
}

MinimizeResult minimize_fixed_point(const Problem& pr, const SolverConfig& cfg0) {
  const SolverConfig cfg = fill_defaults(pr, cfg0);
  const PhiSpec ph = pr.phi0();
  MinimizeResult res;
  double om = cfg.fp_damping;
  Field u = solve_harmonic(pr.grid, pr.datum, nullptr, cfg.sor_tol, cfg.sor_max_sweeps,
                           cfg.sor_omega);
  pin_datum(u, pr);
  auto deriv_at = [&](const Field& f) {
    const double m2 = weighted_volume_m2(f, pr.q, ph.lambda2, 0.0);
    double d = ph.dphi0(m2).right;
    if (!std::isfinite(d)) d = d > 0.0 ? 1e12 : -1e12;
    return d;
  };
  double lam = deriv_at(u);
  if (!(lam > 0.0)) lam = std::max(lam, 1e-6);
  res.lambda_trace.push_back(lam);
  bool halved = false;
  double best_step = std::numeric_limits<double>::infinity();
  int stale = 0;
  for (int k = 0; k < 60; ++k) {
    u = ac_solve(pr.grid, pr.datum, lam, pr.q, cfg, ph.lambda2, k > 0 ? &u : nullptr);
    const EnergyBreakdown under = total_energy(u, pr.q, pr.phi, 0.0);
    res.history.push_back({k, 0.0, under.total, under.m2, lam});
    const double target = deriv_at(u);
    const double next = (1.0 - om) * lam + om * target;
    res.lambda_trace.push_back(next);
    if (!(next > 0.0) || !std::isfinite(next)) {
      res.notes = "lambda left (0, inf); aborted with trace";
      res.converged = false;
      break;
    }
    const double step = std::abs(next - lam);
    if (step <= cfg.fp_tol * std::max(lam, 1.0)) {
      lam = next;
      res.converged = true;
      break;
    }
    // The map lambda -> Phi0'(M2(u_lambda)) is piecewise constant at grid
    // scale, so the iteration can orbit inside one quantization band forever.
    // Treat a stalled step size as converged when it is already small.
    if (step < 0.9 * best_step) {
      best_step = step;
      stale = 0;
    } else if (++stale >= 6) {
      res.converged = step <= 1e-3 * std::max(lam, 1.0);
      res.notes = res.converged ? "lambda resolved to the volume quantization floor"
                                : "lambda iteration stalled above tolerance";
      lam = next;
      break;
    }
    // Period-2 oscillation: damp harder once.
    const size_t m = res.lambda_trace.size();
    if (!halved && m >= 3 &&
        std::abs(res.lambda_trace[m - 1] - res.lambda_trace[m - 3]) <=
            cfg.fp_tol * std::max(lam, 1.0)) {
      om *= 0.5;
      halved = true;
      res.notes = "period-2 oscillation; damping halved";
    }
    lam = next;
  }
  u = ac_solve(pr.grid, pr.datum, lam, pr.q, cfg, ph.lambda2, &u);
  res.field = u;
  res.breakdown = total_energy(u, pr.q, pr.phi, 0.0);
  if (res.converged) {
    const double d = deriv_at(u);
    res.converged = std::abs(lam - d) <= 10.0 * cfg.fp_tol * std::max(lam, 1.0);
  }
  return res;
}

MinimalityReport verify_minimality(const Field& u, const Problem& pr,
                                   int n_perturbations, double amplitude,
                                   unsigned seed) {
  const Grid& g = u.grid;
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double j0 = total_energy(u, pr.q, pr.phi, 0.0).total;
  MinimalityReport rep;
  rep.min_gap = std::numeric_limits<double>::infinity();
  Field trial = u;
  for (int id = 0; id < n_perturbations; ++id) {
    int ci = -1, cj = 0;
    double rad = 0.0;
    for (int attempt = 0; attempt < 200; ++attempt) {
      const int ti = (int)(uni(rng) * g.nx) % g.nx;
      const int tj = g.dim == 2 ? (int)(uni(rng) * g.ny) % g.ny : 0;
      if (g.mask[g.node_index(ti, tj)] != NodeClass::Interior) continue;
      const double r = (4.0 + 4.0 * uni(rng)) * g.h;
      // Support plus one spacing must stay strictly interior.
      bool clear = true;
      const int reach = (int)std::ceil(r / g.h) + 1;
      for (int dj = -reach; dj <= reach && clear; ++dj) {
        if (g.dim == 1 && dj != 0) continue;
        for (int di = -reach; di <= reach && clear; ++di) {
          const int ii = ti + di, jj = tj + dj;
          if (ii < 0 || ii >= g.nx || (g.dim == 2 && (jj < 0 || jj >= g.ny))) {
            if (std::hypot(di * g.h, dj * g.h) < r + g.h) clear = false;
            continue;
          }
          if (std::hypot(di * g.h, dj * g.h) < r + g.h &&
              g.mask[g.node_index(ii, jj)] != NodeClass::Interior)
            clear = false;
        }
      }
      if (clear) {
        ci = ti;
        cj = tj;
        rad = r;
        break;
      }
    }
    if (ci < 0) continue;  // domain too tight for this draw
    const double bx = g.x(ci), by = g.dim == 2 ? g.y(cj) : 0.0;
    for (const double t : {amplitude, -amplitude, 0.25 * amplitude, -0.25 * amplitude}) {
      trial.v = u.v;
      for (int j = 0; j < (g.dim == 2 ? g.ny : 1); ++j) {
        for (int i = 0; i < g.nx; ++i) {
          const int idx = g.node_index(i, j);
          if (g.mask[idx] != NodeClass::Interior) continue;
          const double dx = g.x(i) - bx;
          const double dy = g.dim == 2 ? g.y(j) - by : 0.0;
          const double rho2 = (dx * dx + dy * dy) / (rad * rad);
          if (rho2 < 1.0) trial.v[idx] += t * (1.0 - rho2) * (1.0 - rho2);
        }
      }
      const double gap = total_energy(trial, pr.q, pr.phi, 0.0).total - j0;
      if (gap < rep.min_gap) {
        rep.min_gap = gap;
        rep.worst_id = id;
      }
    }
  }
  if (!std::isfinite(rep.min_gap)) rep.min_gap = 0.0;
  return rep;
}

}  // namespace fblab
