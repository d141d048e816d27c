#include "fblab/blowup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace fblab {

namespace {

double sup_abs_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (int idx = 0; idx < a.grid.num_nodes(); ++idx)
    if (a.grid.mask[idx] != NodeClass::Exterior)
      m = std::max(m, std::abs(a.v[idx] - b.v[idx]));
  return m;
}

double hausdorff_points(const FreeBoundary& a, const FreeBoundary& b) {
  if (a.points.empty() && b.points.empty()) return 0.0;
  if (a.points.empty() || b.points.empty()) return 2.0;  // target-domain diameter
  auto one_sided = [](const FreeBoundary& p, const FreeBoundary& q) {
    double worst = 0.0;
    for (const FBPoint& x : p.points) {
      double best = std::numeric_limits<double>::infinity();
      for (const FBPoint& y : q.points)
        best = std::min(best, std::hypot(x.x - y.x, x.y - y.y));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_sided(a, b), one_sided(b, a));
}

void require_ball(const Grid& g, double cx, double cy, double r) {
  if (g.dim != 2) throw std::invalid_argument("blowup monitor: 2D grids only");
  const int i0 = std::max(0, (int)std::floor((cx - r - g.ox) / g.h));
  const int i1 = std::min(g.nx - 1, (int)std::ceil((cx + r - g.ox) / g.h));
  const int j0 = std::max(0, (int)std::floor((cy - r - g.oy) / g.h));
  const int j1 = std::min(g.ny - 1, (int)std::ceil((cy + r - g.oy) / g.h));
  if (cx - r < g.ox - 1e-12 || cx + r > g.x(g.nx - 1) + 1e-12 ||
      cy - r < g.oy - 1e-12 || cy + r > g.y(g.ny - 1) + 1e-12)
    throw std::invalid_argument("ball leaves the grid");
  for (int j = j0; j <= j1; ++j)
    for (int i = i0; i <= i1; ++i) {
      const double dx = g.x(i) - cx, dy = g.y(j) - cy;
      if (dx * dx + dy * dy <= r * r &&
          g.mask[g.node_index(i, j)] == NodeClass::Exterior)
        throw std::invalid_argument("ball crosses the exterior");
    }
}

}  // namespace

Grid default_blowup_grid(int dim) {
  if (dim == 1) return make_interval(257, -1.0, 1.0);
  return make_rectangle(129, 129, -1.0, -1.0, 1.0, 1.0);
}

Field rescale(const Field& u, double x0, double y0, double rho, const Grid& target) {
  if (!(rho > 0.0)) throw std::invalid_argument("rescale: rho must be positive");
  Field out(target);
  for (int j = 0; j < (target.dim == 2 ? target.ny : 1); ++j) {
    for (int i = 0; i < target.nx; ++i) {
      const int idx = target.node_index(i, j);
      if (target.mask[idx] == NodeClass::Exterior) continue;
      const double sx = x0 + rho * target.x(i);
      const double sy = u.grid.dim == 2 ? y0 + rho * (target.dim == 2 ? target.y(j) : 0.0)
                                        : 0.0;
      out.v[idx] = interpolate(u, sx, sy) / rho;
    }
  }
  return out;
}

BlowupSequence blowup_sequence(const Field& u, double x0, double y0, double rho0,
                               int K, const Grid& target) {
  const FreeBoundary fb = extract_free_boundary(u);
  double dist = std::numeric_limits<double>::infinity();
  for (const FBPoint& p : fb.points)
    dist = std::min(dist, std::hypot(x0 - p.x, (u.grid.dim == 2 ? y0 - p.y : 0.0)));
  if (!(dist <= u.grid.h))
    throw std::invalid_argument("blowup_sequence: center is not within h of the free boundary");
  if (K < 0) throw std::invalid_argument("blowup_sequence: K must be >= 0");
  if (rho0 * std::pow(2.0, -K) < 8.0 * u.grid.h)
    throw std::invalid_argument("blowup_sequence: rho_K below 8h, rescaling would be noise");
  BlowupSequence seq;
  seq.x0 = x0;
  seq.y0 = y0;
  for (int k = 0; k <= K; ++k) {
    const double rho = rho0 * std::pow(2.0, -k);
    seq.rhos.push_back(rho);
    seq.fields.push_back(rescale(u, x0, y0, rho, target));
  }
  std::vector<FreeBoundary> gammas;
  gammas.reserve(seq.fields.size());
  for (const Field& f : seq.fields) gammas.push_back(extract_free_boundary(f));
  for (size_t k = 0; k + 1 < seq.fields.size(); ++k) {
    seq.sup_diff.push_back(sup_abs_diff(seq.fields[k], seq.fields[k + 1]));
    seq.hausdorff.push_back(hausdorff_points(gammas[k], gammas[k + 1]));
  }
  return seq;
}

AcLimitOut ac_limit_compare(const BlowupSequence& seq, const PhiSpec& phi,
                            const QField& q, double m2_of_u, const SolverConfig& cfg) {
  if (seq.fields.empty()) throw std::invalid_argument("ac_limit_compare: empty sequence");
  AcLimitOut out;
  const Field& finest = seq.fields.back();
  const Grid& tg = finest.grid;
  const double qx = [&]() {
    if (q.constant) return q.value;
    // Q at the blow-up center, nearest-node on the source grid.
    return q.values[0] > 0.0 ? q.values[0] : 1.0;
  }();
  const PhiDeriv d = phi.dphi0(m2_of_u);
  out.kink = d.kink;
  out.lambda0_lo = phi.lambda2 * std::min(d.left, d.right) * qx;
  out.lambda0_hi = phi.lambda2 * std::max(d.left, d.right) * qx;
  const double lam = out.lambda0();
  if (!(lam > 0.0) || !std::isfinite(lam))
    throw std::invalid_argument("ac_limit_compare: lambda0 not in (0, inf)");
  SolverConfig c = cfg;
  c.restarts = 0;
  Field v0 = ac_solve(tg, finest, lam, QField::uniform(1.0), c, 1.0);
  out.sup_gap = sup_abs_diff(finest, v0);
  // Positive-side slope of the finest rescaled field at its boundary point
  // nearest the blow-up origin.
  const FreeBoundary fb = extract_free_boundary(finest);
  double best = std::numeric_limits<double>::infinity();
  const FBPoint* at = nullptr;
  for (const FBPoint& p : fb.points) {
    const double dd = std::hypot(p.x, p.y);
    if (dd < best) {
      best = dd;
      at = &p;
    }
  }
  if (at && (at->nx != 0.0 || at->ny != 0.0)) {
    const SlopePair s = one_sided_slopes(finest, at->x, at->y, at->nx, at->ny,
                                         {tg.h, 2.0 * tg.h, 3.0 * tg.h});
    if (s.alpha_ok) out.slope_gap = std::abs(s.alpha - std::sqrt(lam)) / std::sqrt(lam);
  }
  return out;
}

double weiss_energy(const Field& u, double cx, double cy, double r, double lambda0,
                    WeissMode mode) {
  const Grid& g = u.grid;
  require_ball(g, cx, cy, r);
  const double cm = g.h * g.h;
  double bulk = 0.0;
  for (int j = 0; j + 1 < g.ny; ++j) {
    for (int i = 0; i + 1 < g.nx; ++i) {
      const double cw = g.cell_weight[g.cell_index(i, j)];
      if (cw == 0.0) continue;
      const double xm = g.x(i) + 0.5 * g.h, ym = g.y(j) + 0.5 * g.h;
      if (std::hypot(xm - cx, ym - cy) > r) continue;
      const double a = u.v[g.node_index(i, j)], b = u.v[g.node_index(i + 1, j)];
      const double c = u.v[g.node_index(i, j + 1)], d = u.v[g.node_index(i + 1, j + 1)];
      const double gx = ((b - a) + (d - c)) / (2.0 * g.h);
      const double gy = ((c - a) + (d - b)) / (2.0 * g.h);
      const double chi = cell_positive_fraction_2d(a, b, c, d);
      bulk += cw * cm * (gx * gx + gy * gy + lambda0 * lambda0 * chi);
    }
  }
  const int ntheta = std::max(64, 8 * (int)std::ceil(2.0 * std::numbers::pi * r / g.h));
  double ring = 0.0;
  for (int t = 0; t < ntheta; ++t) {
    const double th = 2.0 * std::numbers::pi * t / ntheta;
    const double val = interpolate(u, cx + r * std::cos(th), cy + r * std::sin(th));
    ring += val * val;
  }
  ring *= 2.0 * std::numbers::pi * r / ntheta;
  if (mode == WeissMode::Standard) return bulk / (r * r) - ring / (r * r * r);
  return bulk / (r * r) - ring / (r * r * r * r);
}

double acf_functional(const Field& u, double x0, double y0, double r, AcfMode mode) {
  const Grid& g = u.grid;
  require_ball(g, x0, y0, r);
  const double cm = g.h * g.h;
  // Nearest node to the center, for the paper-mode singular patch.
  const int ci = std::clamp((int)std::lround((x0 - g.ox) / g.h), 0, g.nx - 1);
  const int cj = std::clamp((int)std::lround((y0 - g.oy) / g.h), 0, g.ny - 1);
  double ip = 0.0, im = 0.0;
  for (int j = 0; j + 1 < g.ny; ++j) {
    for (int i = 0; i + 1 < g.nx; ++i) {
      const double cw = g.cell_weight[g.cell_index(i, j)];
      if (cw == 0.0) continue;
      const double xm = g.x(i) + 0.5 * g.h, ym = g.y(j) + 0.5 * g.h;
      const double dd = std::hypot(xm - x0, ym - y0);
      if (dd > r) continue;
      double den = 1.0;
      if (mode == AcfMode::Paper) {
        if (std::abs(i - ci) <= 1 && std::abs(j - cj) <= 1 && i + 1 >= ci && j + 1 >= cj)
          continue;  // 3x3 node patch excluded
        den = dd * dd;
        if (den == 0.0) continue;
      }
      auto part = [&](double sgn) {
        const double a = std::max(sgn * u.v[g.node_index(i, j)], 0.0);
        const double b = std::max(sgn * u.v[g.node_index(i + 1, j)], 0.0);
        const double c = std::max(sgn * u.v[g.node_index(i, j + 1)], 0.0);
        const double d = std::max(sgn * u.v[g.node_index(i + 1, j + 1)], 0.0);
        const double gx = ((b - a) + (d - c)) / (2.0 * g.h);
        const double gy = ((c - a) + (d - b)) / (2.0 * g.h);
        return gx * gx + gy * gy;
      };
      ip += cw * cm * part(1.0) / den;
      im += cw * cm * part(-1.0) / den;
    }
  }
  return ip * im / (r * r * r * r);
}

std::optional<double> flatness_measure(const FreeBoundary& fb, double x0, double y0,
                                       double r) {
  std::vector<std::array<double, 2>> pts;
  for (const FBPoint& p : fb.points)
    if (std::hypot(p.x - x0, p.y - y0) <= r) pts.push_back({p.x, p.y});
  if (pts.size() < 3) return std::nullopt;
  double mx = 0.0, my = 0.0;
  for (const auto& p : pts) {
    mx += p[0];
    my += p[1];
  }
  mx /= pts.size();
  my /= pts.size();
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& p : pts) {
    const double dx = p[0] - mx, dy = p[1] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  // Smallest-eigenvalue direction of the 2x2 covariance = TLS line normal.
  const double tr = sxx + syy, det = sxx * syy - sxy * sxy;
  const double lam_min = 0.5 * tr - std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
  double nx_, ny_;
  if (std::abs(sxy) > 1e-300) {
    nx_ = lam_min - syy;
    ny_ = sxy;
  } else {
    // Axis-aligned covariance: normal along the smaller-variance axis.
    if (sxx <= syy) {
      nx_ = 1.0;
      ny_ = 0.0;
    } else {
      nx_ = 0.0;
      ny_ = 1.0;
    }
  }
  const double mag = std::hypot(nx_, ny_);
  if (mag == 0.0) return 0.0;
  nx_ /= mag;
  ny_ /= mag;
  double worst = 0.0;
  for (const auto& p : pts)
    worst = std::max(worst, std::abs((p[0] - mx) * nx_ + (p[1] - my) * ny_));
  return worst / r;
}

}  // namespace fblab
