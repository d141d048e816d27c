#include "fblab/fbgeom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace fblab {

namespace {

constexpr double kInf = 1e18;

bool positive(double v) { return v > 0.0; }

struct BallIter {
  int i0, i1, j0, j1;
};

BallIter ball_box(const Grid& g, double cx, double cy, double r) {
  BallIter b;
  b.i0 = std::max(0, (int)std::ceil((cx - r - g.ox) / g.h - 1e-12));
  b.i1 = std::min(g.nx - 1, (int)std::floor((cx + r - g.ox) / g.h + 1e-12));
  if (g.dim == 2) {
    b.j0 = std::max(0, (int)std::ceil((cy - r - g.oy) / g.h - 1e-12));
    b.j1 = std::min(g.ny - 1, (int)std::floor((cy + r - g.oy) / g.h + 1e-12));
  } else {
    b.j0 = b.j1 = 0;
  }
  return b;
}

double dist2(const Grid& g, int i, int j, double cx, double cy) {
  const double dx = g.x(i) - cx;
  const double dy = g.dim == 2 ? g.y(j) - cy : 0.0;
  return dx * dx + dy * dy;
}

// All nodes of the closed ball exist and are non-exterior.
bool ball_in_mask(const Grid& g, double cx, double cy, double r) {
  if (g.dim == 1) {
    if (cx - r < g.ox - 1e-12 || cx + r > g.x(g.nx - 1) + 1e-12) return false;
  } else {
    if (cx - r < g.ox - 1e-12 || cx + r > g.x(g.nx - 1) + 1e-12 ||
        cy - r < g.oy - 1e-12 || cy + r > g.y(g.ny - 1) + 1e-12)
      return false;
  }
  const BallIter b = ball_box(g, cx, cy, r);
  for (int j = b.j0; j <= b.j1; ++j)
    for (int i = b.i0; i <= b.i1; ++i)
      if (dist2(g, i, j, cx, cy) <= r * r &&
          g.mask[g.node_index(i, j)] == NodeClass::Exterior)
        return false;
  return true;
}

double q_at_point(const QField& q, const Grid& g, double x, double y) {
  if (q.constant) return q.value;
  const int i = std::clamp((int)std::lround((x - g.ox) / g.h), 0, g.nx - 1);
  const int j = g.dim == 2 ? std::clamp((int)std::lround((y - g.oy) / g.h), 0, g.ny - 1)
                           : 0;
  return q.values[g.node_index(i, j)];
}

}  // namespace

FreeBoundary extract_free_boundary(const Field& u) {
  const Grid& g = u.grid;
  FreeBoundary fb;
  if (g.dim == 1) {
    for (int i = 0; i + 1 < g.nx; ++i) {
      if (g.cell_weight[i] == 0.0) continue;
      const double a = u.v[i], b = u.v[i + 1];
      if (positive(a) == positive(b)) continue;
      // A zero pinned on a Dirichlet boundary node is contact with the fixed
      // boundary, not a free boundary point (Gamma lives in the interior).
      if (a == 0.0 && g.mask[i] == NodeClass::Boundary) continue;
      if (b == 0.0 && g.mask[i + 1] == NodeClass::Boundary) continue;
      const double t = a / (a - b);
      FBPoint p;
      p.x = g.x(i) + t * g.h;
      p.nx = positive(a) ? 1.0 : -1.0;
      p.ny = 0.0;
      fb.points.push_back(p);
    }
    return fb;
  }
  for (int j = 0; j + 1 < g.ny; ++j) {
    for (int i = 0; i + 1 < g.nx; ++i) {
      if (g.cell_weight[g.cell_index(i, j)] == 0.0) continue;
      const double a = u.v[g.node_index(i, j)];
      const double b = u.v[g.node_index(i + 1, j)];
      const double c = u.v[g.node_index(i, j + 1)];
      const double d = u.v[g.node_index(i + 1, j + 1)];
      const bool pa = positive(a), pb = positive(b), pc = positive(c), pd = positive(d);
      if (pa == pb && pb == pc && pc == pd) continue;
      const double x0 = g.x(i), y0 = g.y(j);
      std::array<double, 2> pB{0, 0}, pR{0, 0}, pT{0, 0}, pL{0, 0};
      const bool eB = pa != pb, eR = pb != pd, eT = pc != pd, eL = pa != pc;
      if (eB) pB = {x0 + g.h * (a / (a - b)), y0};
      if (eR) pR = {x0 + g.h, y0 + g.h * (b / (b - d))};
      if (eT) pT = {x0 + g.h * (c / (c - d)), y0 + g.h};
      if (eL) pL = {x0, y0 + g.h * (a / (a - c))};
      std::vector<std::array<double, 4>> segs;
      const int ncross = (int)eB + (int)eR + (int)eT + (int)eL;
      if (ncross == 4) {
        // Saddle: connect by the sign of the corner average.
        const double s = 0.25 * (a + b + c + d);
        if (positive(s) == pa) {
          segs.push_back({pB[0], pB[1], pR[0], pR[1]});
          segs.push_back({pL[0], pL[1], pT[0], pT[1]});
        } else {
          segs.push_back({pL[0], pL[1], pB[0], pB[1]});
          segs.push_back({pR[0], pR[1], pT[0], pT[1]});
        }
      } else {
        std::vector<std::array<double, 2>> cr;
        if (eB) cr.push_back(pB);
        if (eR) cr.push_back(pR);
        if (eT) cr.push_back(pT);
        if (eL) cr.push_back(pL);
        if (cr.size() == 2) segs.push_back({cr[0][0], cr[0][1], cr[1][0], cr[1][1]});
      }
      const double gx = ((b - a) + (d - c)) / (2.0 * g.h);
      const double gy = ((c - a) + (d - b)) / (2.0 * g.h);
      const double mag = std::hypot(gx, gy);
      for (const auto& s : segs) {
        fb.segments.push_back(s);
        FBPoint p;
        p.x = 0.5 * (s[0] + s[2]);
        p.y = 0.5 * (s[1] + s[3]);
        if (mag > 0.0) {
          p.nx = -gx / mag;
          p.ny = -gy / mag;
        }
        fb.points.push_back(p);
      }
    }
  }
  return fb;
}

SlopePair one_sided_slopes(const Field& u, double px, double py, double nx, double ny,
                           const std::vector<double>& offsets) {
  SlopePair s;
  double num_a = 0.0, num_b = 0.0, den = 0.0;
  bool ok_a = true, ok_b = true;
  for (double t : offsets) {
    den += t * t;
    try {
      num_a += t * interpolate(u, px - t * nx, py - t * ny);
    } catch (const std::exception&) {
      ok_a = false;
    }
    try {
      num_b += t * interpolate(u, px + t * nx, py + t * ny);
    } catch (const std::exception&) {
      ok_b = false;
    }
  }
  if (den <= 0.0) return s;
  if (ok_a) {
    s.alpha = num_a / den;
    s.alpha_ok = true;
  }
  if (ok_b) {
    s.beta = -num_b / den;  // flipped so a genuine negative phase reads positive
    s.beta_ok = true;
  }
  return s;
}

BernoulliStats bernoulli_residuals(const Field& u, FreeBoundary& fb, const PhiSpec& phi,
                                   const QField& q) {
  const Grid& g = u.grid;
  const PhiSpec ph = attach_domain(phi, g, q);
  const double m2 = weighted_volume_m2(u, q, ph.lambda2, 0.0);
  const double m1 = weighted_volume_m1(m2, ph.lambda1, ph.lambda2, ph.lambda_omega);
  const std::vector<double> offsets = {g.h, 2.0 * g.h, 3.0 * g.h};
  std::vector<double> rs;
  for (FBPoint& p : fb.points) {
    if (p.nx == 0.0 && p.ny == 0.0) continue;
    const SlopePair s = one_sided_slopes(u, p.x, p.y, p.nx, p.ny, offsets);
    p.alpha = s.alpha;
    p.beta = s.beta;
    p.alpha_ok = s.alpha_ok;
    p.beta_ok = s.beta_ok;
    if (!s.alpha_ok || !s.beta_ok) continue;
    const LambdaJump lam = lambda_bernoulli(ph, m1, m2, q_at_point(q, g, p.x, p.y));
    const double v = s.alpha * s.alpha - s.beta * s.beta;
    const double dist = v < lam.lo ? lam.lo - v : (v > lam.hi ? v - lam.hi : 0.0);
    const double denom = std::max(1.0, std::max(std::abs(lam.lo), std::abs(lam.hi)));
    p.residual = dist / denom;
    rs.push_back(p.residual);
  }
  BernoulliStats st;
  st.count = (int)rs.size();
  if (!rs.empty()) {
    std::sort(rs.begin(), rs.end());
    st.median = rs[rs.size() / 2];
    st.p90 = rs[std::min(rs.size() - 1, (size_t)(0.9 * rs.size()))];
  }
  return st;
}

namespace {

// Weighted mean of f(node) over the closed ball; weight = node quadrature
// weight. Returns false if the ball has no usable nodes.
template <class F>
bool ball_mean(const Field& u, double cx, double cy, double r, F f, double& mean) {
  const Grid& g = u.grid;
  const BallIter b = ball_box(g, cx, cy, r);
  double sw = 0.0, sv = 0.0;
  for (int j = b.j0; j <= b.j1; ++j) {
    for (int i = b.i0; i <= b.i1; ++i) {
      if (dist2(g, i, j, cx, cy) > r * r) continue;
      const int idx = g.node_index(i, j);
      if (g.mask[idx] == NodeClass::Exterior) continue;
      const double w = g.node_weight[idx];
      double val;
      if (!f(u.v[idx], val)) continue;
      sw += w;
      sv += w * val;
    }
  }
  if (sw <= 0.0) return false;
  mean = sv / sw;
  return true;
}

}  // namespace

SubharmonicityOut subharmonicity_defect(const Field& u, int n_samples,
                                        const std::vector<double>& radii,
                                        unsigned seed) {
  const Grid& g = u.grid;
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  SubharmonicityOut out;
  out.max_defect = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < n_samples; ++s) {
    const double r = radii[s % radii.size()];
    for (int attempt = 0; attempt < 100; ++attempt) {
      const int i = (int)(uni(rng) * g.nx) % g.nx;
      const int j = g.dim == 2 ? (int)(uni(rng) * g.ny) % g.ny : 0;
      const int idx = g.node_index(i, j);
      if (g.mask[idx] != NodeClass::Interior) continue;
      const double cx = g.x(i), cy = g.dim == 2 ? g.y(j) : 0.0;
      if (!ball_in_mask(g, cx, cy, r)) continue;
      double mean;
      if (!ball_mean(u, cx, cy, r,
                     [](double v, double& o) {
                       o = v;
                       return true;
                     },
                     mean))
        continue;
      const double defect = u.v[idx] - mean;
      if (defect > out.max_defect) {
        out.max_defect = defect;
        out.x = cx;
        out.y = cy;
        out.r = r;
      }
      break;
    }
  }
  if (!std::isfinite(out.max_defect)) out.max_defect = 0.0;
  return out;
}

double nondegeneracy_scan(const Field& u, const FreeBoundary& fb,
                          const std::vector<double>& radii, DensityReport* report) {
  const Grid& g = u.grid;
  double global_min = std::numeric_limits<double>::infinity();
  if (report) {
    report->radii = radii;
    report->min_volume_fraction.assign(radii.size(), 1.0);
    report->min_nondeg_ratio.assign(radii.size(), std::numeric_limits<double>::infinity());
  }
  const size_t stride = std::max<size_t>(1, fb.points.size() / 512);
  for (size_t k = 0; k < radii.size(); ++k) {
    const double r = radii[k];
    for (size_t pi = 0; pi < fb.points.size(); pi += stride) {
      const FBPoint& p = fb.points[pi];
      if (!ball_in_mask(g, p.x, p.y, r)) continue;
      const BallIter b = ball_box(g, p.x, p.y, r);
      double sw_pos = 0.0, sv_pos = 0.0, sw_all = 0.0;
      for (int j = b.j0; j <= b.j1; ++j) {
        for (int i = b.i0; i <= b.i1; ++i) {
          if (dist2(g, i, j, p.x, p.y) > r * r) continue;
          const int idx = g.node_index(i, j);
          if (g.mask[idx] == NodeClass::Exterior) continue;
          const double w = g.node_weight[idx];
          sw_all += w;
          if (u.v[idx] > 0.0) {
            sw_pos += w;
            sv_pos += w * u.v[idx] * u.v[idx];
          }
        }
      }
      if (sw_pos <= 0.0 || sw_all <= 0.0) continue;
      const double ratio = (sv_pos / sw_pos) / (r * r);
      global_min = std::min(global_min, ratio);
      if (report) {
        report->min_nondeg_ratio[k] = std::min(report->min_nondeg_ratio[k], ratio);
        report->min_volume_fraction[k] =
            std::min(report->min_volume_fraction[k], sw_pos / sw_all);
      }
    }
  }
  return std::isfinite(global_min) ? global_min : 0.0;
}

std::vector<double> squared_distance_transform(const Grid& g,
                                               const std::vector<std::uint8_t>& keep) {
  const int nx = g.nx, ny = g.dim == 2 ? g.ny : 1;
  std::vector<double> d((size_t)nx * ny);
  for (size_t i = 0; i < d.size(); ++i) d[i] = keep[i] ? kInf : 0.0;
  std::vector<double> f(std::max(nx, ny)), out(std::max(nx, ny)), z(std::max(nx, ny) + 1);
  std::vector<int> v(std::max(nx, ny));
  auto dt1 = [&](int n) {
    int k = 0;
    v[0] = 0;
    z[0] = -kInf;
    z[1] = kInf;
    for (int q = 1; q < n; ++q) {
      double s = ((f[q] + (double)q * q) - (f[v[k]] + (double)v[k] * v[k])) /
                 (2.0 * q - 2.0 * v[k]);
      while (s <= z[k]) {
        --k;
        s = ((f[q] + (double)q * q) - (f[v[k]] + (double)v[k] * v[k])) /
            (2.0 * q - 2.0 * v[k]);
      }
      ++k;
      v[k] = q;
      z[k] = s;
      z[k + 1] = kInf;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
      while (z[k + 1] < q) ++k;
      out[q] = (double)(q - v[k]) * (q - v[k]) + f[v[k]];
    }
  };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) f[i] = d[(size_t)j * nx + i];
    dt1(nx);
    for (int i = 0; i < nx; ++i) d[(size_t)j * nx + i] = out[i];
  }
  if (ny > 1) {
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j < ny; ++j) f[j] = d[(size_t)j * nx + i];
      dt1(ny);
      for (int j = 0; j < ny; ++j) d[(size_t)j * nx + i] = out[j];
    }
  }
  return d;
}

CleanBallOut clean_ball_scan(const Field& u, const FreeBoundary& fb,
                             const std::vector<double>& radii, DensityReport* report) {
  const Grid& g = u.grid;
  CleanBallOut out;
  out.min_c1 = std::numeric_limits<double>::infinity();
  std::vector<std::uint8_t> keep(g.num_nodes(), 0);
  for (int idx = 0; idx < g.num_nodes(); ++idx)
    keep[idx] = g.mask[idx] != NodeClass::Exterior && u.v[idx] > 0.0;
  const std::vector<double> d2 = squared_distance_transform(g, keep);
  if (report) {
    if (report->radii.empty()) report->radii = radii;
    report->max_clean_c1.assign(radii.size(), 0.0);
    report->min_clean_c1.assign(radii.size(), std::numeric_limits<double>::infinity());
  }
  const size_t stride = std::max<size_t>(1, fb.points.size() / 512);
  int samples = 0;
  for (size_t k = 0; k < radii.size(); ++k) {
    const double r = radii[k];
    for (size_t pi = 0; pi < fb.points.size(); pi += stride) {
      const FBPoint& p = fb.points[pi];
      if (!ball_in_mask(g, p.x, p.y, r)) continue;
      const BallIter b = ball_box(g, p.x, p.y, r);
      double best = 0.0, sw_pos = 0.0, sw_all = 0.0;
      for (int j = b.j0; j <= b.j1; ++j) {
        for (int i = b.i0; i <= b.i1; ++i) {
          const double dd = dist2(g, i, j, p.x, p.y);
          if (dd > r * r) continue;
          const int idx = g.node_index(i, j);
          if (g.mask[idx] == NodeClass::Exterior) continue;
          sw_all += g.node_weight[idx];
          if (!keep[idx]) continue;
          sw_pos += g.node_weight[idx];
          const double inscribed =
              std::min(g.h * std::sqrt(d2[idx]), r - std::sqrt(dd));
          best = std::max(best, inscribed);
        }
      }
      if (sw_all <= 0.0) continue;
      ++samples;
      const double c1 = best / r;
      out.max_c1 = std::max(out.max_c1, c1);
      out.min_c1 = std::min(out.min_c1, c1);
      out.min_volume_fraction = std::min(out.min_volume_fraction, sw_pos / sw_all);
      if (report) {
        report->max_clean_c1[k] = std::max(report->max_clean_c1[k], c1);
        report->min_clean_c1[k] = std::min(report->min_clean_c1[k], c1);
      }
    }
  }
  if (samples == 0) {
    out.min_c1 = 0.0;
    out.min_volume_fraction = 0.0;
  }
  return out;
}

GrowthOut growth_bounds(const Field& u, const FreeBoundary& fb,
                        const std::vector<std::array<double, 2>>& probes) {
  const Grid& g = u.grid;
  GrowthOut out;
  out.c_inf = std::numeric_limits<double>::infinity();
  for (const auto& pt : probes) {
    double val;
    try {
      val = interpolate(u, pt[0], g.dim == 2 ? pt[1] : 0.0);
    } catch (const std::exception&) {
      continue;
    }
    if (!(val > 0.0)) continue;
    double dist = std::numeric_limits<double>::infinity();
    for (const FBPoint& p : fb.points)
      dist = std::min(dist, std::hypot(pt[0] - p.x, (g.dim == 2 ? pt[1] : 0.0) - p.y));
    if (!(dist >= 2.0 * g.h) || !std::isfinite(dist)) continue;
    const double ratio = val / dist;
    out.c_sup = std::max(out.c_sup, ratio);
    out.c_inf = std::min(out.c_inf, ratio);
    ++out.probes_used;
  }
  if (out.probes_used == 0) out.c_inf = 0.0;
  return out;
}

GrowthOut growth_bounds_random(const Field& u, const FreeBoundary& fb, int n_probes,
                               unsigned seed) {
  const Grid& g = u.grid;
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<std::array<double, 2>> pts;
  int tries = 0;
  while ((int)pts.size() < n_probes && tries < 50 * n_probes) {
    ++tries;
    const int i = (int)(uni(rng) * g.nx) % g.nx;
    const int j = g.dim == 2 ? (int)(uni(rng) * g.ny) % g.ny : 0;
    const int idx = g.node_index(i, j);
    if (g.mask[idx] != NodeClass::Interior) continue;
    if (!(u.v[idx] > 0.0)) continue;
    pts.push_back({g.x(i), g.dim == 2 ? g.y(j) : 0.0});
  }
  return growth_bounds(u, fb, pts);
}

DeltaUplusOut delta_uplus_measure(const Field& u, double cx, double cy, double r) {
  const Grid& g = u.grid;
  DeltaUplusOut out;
  std::vector<double> up(g.num_nodes(), 0.0);
  for (int idx = 0; idx < g.num_nodes(); ++idx)
    if (g.mask[idx] != NodeClass::Exterior) up[idx] = std::max(u.v[idx], 0.0);
  auto inside = [&](int i, int j) { return dist2(g, i, j, cx, cy) <= r * r; };
  const double hpow = std::pow(g.h, g.dim - 2);  // h^n / h^2
  const BallIter b = ball_box(g, cx, cy, r + 2.0 * g.h);
  for (int j = b.j0; j <= b.j1; ++j) {
    for (int i = b.i0; i <= b.i1; ++i) {
      if (!inside(i, j)) continue;
      const int idx = g.node_index(i, j);
      double lap = -2.0 * g.dim * up[idx];
      lap += (i > 0 ? up[idx - 1] : 0.0) + (i + 1 < g.nx ? up[idx + 1] : 0.0);
      if (g.dim == 2)
        lap += (j > 0 ? up[idx - g.nx] : 0.0) + (j + 1 < g.ny ? up[idx + g.nx] : 0.0);
      out.bulk += lap * hpow;
      // Outward flux over edges leaving the ball.
      const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
      for (int e = 0; e < (g.dim == 1 ? 2 : 4); ++e) {
        const int ii = i + di[e], jj = j + dj[e];
        if (ii < 0 || ii >= g.nx || (g.dim == 2 && (jj < 0 || jj >= g.ny))) continue;
        if (inside(ii, jj)) continue;
        out.flux += (up[g.node_index(ii, jj)] - up[idx]) * hpow;
      }
    }
  }
  // (1/r) integral over B_2r of |grad u+|, cell-based.
  const double r2 = 2.0 * r;
  const BallIter b2 = ball_box(g, cx, cy, r2);
  const double cm = std::pow(g.h, g.dim);
  double gint = 0.0;
  if (g.dim == 1) {
    for (int i = std::max(0, b2.i0); i < std::min(g.nx - 1, b2.i1 + 1); ++i) {
      if (g.cell_weight[i] == 0.0) continue;
      const double xm = g.x(i) + 0.5 * g.h;
      if (std::abs(xm - cx) > r2) continue;
      gint += g.cell_weight[i] * cm * std::abs(up[i + 1] - up[i]) / g.h;
    }
  } else {
    for (int j = std::max(0, b2.j0); j < std::min(g.ny - 1, b2.j1 + 1); ++j) {
      for (int i = std::max(0, b2.i0); i < std::min(g.nx - 1, b2.i1 + 1); ++i) {
        const double cw = g.cell_weight[g.cell_index(i, j)];
        if (cw == 0.0) continue;
        const double xm = g.x(i) + 0.5 * g.h, ym = g.y(j) + 0.5 * g.h;
        if (std::hypot(xm - cx, ym - cy) > r2) continue;
        const double a = up[g.node_index(i, j)], bb = up[g.node_index(i + 1, j)];
        const double c = up[g.node_index(i, j + 1)], d = up[g.node_index(i + 1, j + 1)];
        const double gx = ((bb - a) + (d - c)) / (2.0 * g.h);
        const double gy = ((c - a) + (d - bb)) / (2.0 * g.h);
        gint += cw * cm * std::hypot(gx, gy);
      }
    }
  }
  out.grad_bound = gint / r;
  return out;
}

double perimeter_estimate(const FreeBoundary& fb, double cx, double cy, double r) {
  if (fb.segments.empty()) {
    // 1D: crossings are points; the (n-1)-measure is a count.
    double count = 0.0;
    for (const FBPoint& p : fb.points)
      if (std::hypot(p.x - cx, p.y - cy) <= r) count += 1.0;
    return count;
  }
  double len = 0.0;
  for (const auto& s : fb.segments) {
    const double dx = s[2] - s[0], dy = s[3] - s[1];
    const double a = dx * dx + dy * dy;
    if (a == 0.0) continue;
    const double ex = s[0] - cx, ey = s[1] - cy;
    const double bq = 2.0 * (dx * ex + dy * ey);
    const double cq = ex * ex + ey * ey - r * r;
    const double disc = bq * bq - 4.0 * a * cq;
    if (disc <= 0.0) {
      if (cq <= 0.0) len += std::sqrt(a);  // fully inside
      continue;
    }
    const double sq = std::sqrt(disc);
    const double t0 = std::max(0.0, (-bq - sq) / (2.0 * a));
    const double t1 = std::min(1.0, (-bq + sq) / (2.0 * a));
    if (t1 > t0) len += (t1 - t0) * std::sqrt(a);
  }
  return len;
}

PhaseSeparationOut phase_separation_check(const Field& u) {
  const Grid& g = u.grid;
  double sup = 0.0;
  for (int idx = 0; idx < g.num_nodes(); ++idx)
    if (g.mask[idx] != NodeClass::Exterior) sup = std::max(sup, std::abs(u.v[idx]));
  const double tau = 1e-8 * (1.0 + sup);
  PhaseSeparationOut out;
  const int ny = g.dim == 2 ? g.ny : 1;
  auto klass = [&](int i, int j) -> int {  // -1 neg, 0 zeroish, +1 pos, -2 exterior
    if (i < 0 || i >= g.nx || j < 0 || j >= ny) return -2;
    const int idx = g.node_index(i, j);
    if (g.mask[idx] == NodeClass::Exterior) return -2;
    if (u.v[idx] > tau) return 1;
    if (u.v[idx] < -tau) return -1;
    return 0;
  };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (klass(i, j) != 0) continue;
      const bool neg_adjacent = klass(i - 1, j) == -1 || klass(i + 1, j) == -1 ||
                                (g.dim == 2 && (klass(i, j - 1) == -1 || klass(i, j + 1) == -1));
      if (!neg_adjacent) continue;
      bool pos_near = false;
      for (int dj = -2; dj <= 2 && !pos_near; ++dj) {
        if (g.dim == 1 && dj != 0) continue;
        for (int di = -2; di <= 2 && !pos_near; ++di)
          if (klass(i + di, j + dj) == 1) pos_near = true;
      }
      if (!pos_near) {
        ++out.flagged;
        if (out.worst_node < 0) out.worst_node = g.node_index(i, j);
        out.pass = false;
      }
    }
  }
  return out;
}

double varpi_lower_bound(double boundary_integral_uplus, double sup_uplus,
                         double j_of_ubar, double c_omega) {
  if (!(boundary_integral_uplus > 0.0)) return 0.0;
  const double denom =
      c_omega * (c_omega * j_of_ubar + 2.0 * sup_uplus * boundary_integral_uplus);
  if (!(denom > 0.0)) return 0.0;
  return boundary_integral_uplus * boundary_integral_uplus / denom;
}

std::vector<std::pair<double, double>> degeneracy_indicator(
    const Field& u, double x0, double y0, const std::vector<double>& radii) {
  std::vector<std::pair<double, double>> out;
  for (double r : radii) {
    double mean = 0.0;
    const bool ok = ball_mean(u, x0, y0, r,
                              [](double v, double& o) {
                                o = std::max(-v, 0.0);
                                return true;
                              },
                              mean);
    out.emplace_back(r, ok ? mean / r : 0.0);
  }
  return out;
}

}  // namespace fblab
