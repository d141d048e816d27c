#include "fblab/energy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace fblab {

QField QField::uniform(double v) {
  if (!(v > 0.0)) throw std::invalid_argument("QField: Q must be positive");
  QField q;
  q.constant = true;
  q.value = v;
  q.q1 = q.q2 = v;
  return q;
}

QField QField::per_node(const Grid& g, const std::function<double(double, double)>& f) {
  QField q;
  q.constant = false;
  q.values.assign(g.num_nodes(), 1.0);
  q.q1 = 1e300;
  q.q2 = 0.0;
  for (int j = 0; j < (g.dim == 2 ? g.ny : 1); ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const int idx = g.node_index(i, j);
      if (g.mask[idx] == NodeClass::Exterior) continue;
      const double v = f(g.x(i), g.dim == 2 ? g.y(j) : 0.0);
      if (!(v > 0.0)) throw std::invalid_argument("QField: Q must be positive");
      q.values[idx] = v;
      q.q1 = std::min(q.q1, v);
      q.q2 = std::max(q.q2, v);
    }
  }
  return q;
}

namespace {
double cell_q_mean(const Grid& g, const QField& Q, int i, int j);
}

double lambda_omega(const Grid& g, const QField& Q) {
  double s = 0.0;
  const double cm = std::pow(g.h, g.dim);
  if (g.dim == 1) {
    for (int i = 0; i + 1 < g.nx; ++i)
      if (g.cell_weight[i] > 0.0) s += g.cell_weight[i] * cm * cell_q_mean(g, Q, i, 0);
    return s;
  }
  for (int j = 0; j + 1 < g.ny; ++j)
    for (int i = 0; i + 1 < g.nx; ++i) {
      const double w = g.cell_weight[g.cell_index(i, j)];
      if (w > 0.0) s += w * cm * cell_q_mean(g, Q, i, j);
    }
  return s;
}

double dirichlet_energy(const Field& u) {
  const Grid& g = u.grid;
  check_finite(u);
  double e = 0.0;
  if (g.dim == 1) {
    for (int i = 0; i + 1 < g.nx; ++i) {
      const double cw = g.cell_weight[i];
      if (cw == 0.0) continue;
      const double d = u.v[i + 1] - u.v[i];
      e += cw * d * d / g.h;
    }
    return e;
  }
  for (int j = 0; j + 1 < g.ny; ++j) {
    for (int i = 0; i + 1 < g.nx; ++i) {
      const double cw = g.cell_weight[g.cell_index(i, j)];
      if (cw == 0.0) continue;
      const double a = u.v[g.node_index(i, j)];
      const double b = u.v[g.node_index(i + 1, j)];
      const double c = u.v[g.node_index(i, j + 1)];
      const double d = u.v[g.node_index(i + 1, j + 1)];
      e += cw * 0.5 * ((b - a) * (b - a) + (d - c) * (d - c) +
                       (c - a) * (c - a) + (d - b) * (d - b));
    }
  }
  return e;
}

void dirichlet_gradient(const Field& u, std::vector<double>& grad) {
  const Grid& g = u.grid;
  grad.assign(g.num_nodes(), 0.0);
  if (g.dim == 1) {
    for (int i = 0; i + 1 < g.nx; ++i) {
      const double cw = g.cell_weight[i];
      if (cw == 0.0) continue;
      const double d = u.v[i + 1] - u.v[i];
      grad[i] -= 2.0 * cw * d / g.h;
      grad[i + 1] += 2.0 * cw * d / g.h;
    }
    return;
  }
  for (int j = 0; j + 1 < g.ny; ++j) {
    for (int i = 0; i + 1 < g.nx; ++i) {
      const double cw = g.cell_weight[g.cell_index(i, j)];
      if (cw == 0.0) continue;
      const int ia = g.node_index(i, j), ib = g.node_index(i + 1, j);
      const int ic = g.node_index(i, j + 1), id = g.node_index(i + 1, j + 1);
      const double a = u.v[ia], b = u.v[ib], c = u.v[ic], d = u.v[id];
      grad[ia] += cw * ((a - b) + (a - c));
      grad[ib] += cw * ((b - a) + (b - d));
      grad[ic] += cw * ((c - a) + (c - d));
      grad[id] += cw * ((d - b) + (d - c));
    }
  }
}

double cell_positive_fraction_1d(double a, double b) {
  const bool pa = a > 0.0, pb = b > 0.0;
  if (pa && pb) return 1.0;
  if (!pa && !pb) return 0.0;
  return pa ? a / (a - b) : b / (b - a);
}

namespace {

// Area of {f > 0} on a triangle with linear f through the vertex values.
double tri_positive_area(const std::array<double, 2>& p1, double f1,
                         const std::array<double, 2>& p2, double f2,
                         const std::array<double, 2>& p3, double f3) {
  const std::array<double, 2> pts[3] = {p1, p2, p3};
  const double fs[3] = {f1, f2, f3};
  std::array<double, 2> poly[7];
  int n = 0;
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3;
    const bool in_i = fs[i] > 0.0, in_j = fs[j] > 0.0;
    if (in_i) poly[n++] = pts[i];
    if (in_i != in_j) {
      const double t = fs[i] / (fs[i] - fs[j]);
      poly[n++] = {pts[i][0] + t * (pts[j][0] - pts[i][0]),
                   pts[i][1] + t * (pts[j][1] - pts[i][1])};
    }
  }
  double area2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    area2 += poly[i][0] * poly[j][1] - poly[j][0] * poly[i][1];
  }
  return 0.5 * std::abs(area2);
}

}  // namespace

double cell_positive_fraction_2d(double a, double b, double c, double d) {
  const bool pa = a > 0.0, pb = b > 0.0, pc = c > 0.0, pd = d > 0.0;
  if (pa && pb && pc && pd) return 1.0;
  if (a <= 0.0 && b <= 0.0 && c <= 0.0 && d <= 0.0) return 0.0;
  // Fan around the corner average on the unit square; each triangle carries a
  // linear interpolant, clipped exactly.
  const double s = 0.25 * (a + b + c + d);
  const std::array<double, 2> A{0, 0}, B{1, 0}, C{0, 1}, D{1, 1}, M{0.5, 0.5};
  double area = 0.0;
  area += tri_positive_area(A, a, B, b, M, s);
  area += tri_positive_area(B, b, D, d, M, s);
  area += tri_positive_area(D, d, C, c, M, s);
  area += tri_positive_area(C, c, A, a, M, s);
  return std::min(1.0, std::max(0.0, area));
}

namespace {

double cell_q_mean(const Grid& g, const QField& Q, int i, int j) {
  if (Q.constant) return Q.value;
  if (g.dim == 1) return 0.5 * (Q.values[i] + Q.values[i + 1]);
  return 0.25 * (Q.values[g.node_index(i, j)] + Q.values[g.node_index(i + 1, j)] +
                 Q.values[g.node_index(i, j + 1)] + Q.values[g.node_index(i + 1, j + 1)]);
}

double sharp_m2(const Field& u, const QField& Q, double lambda2) {
  const Grid& g = u.grid;
  const double cm = std::pow(g.h, g.dim);
  double s = 0.0;
  if (g.dim == 1) {
    for (int i = 0; i + 1 < g.nx; ++i) {
      const double cw = g.cell_weight[i];
      if (cw == 0.0) continue;
      const double pf = cell_positive_fraction_1d(u.v[i], u.v[i + 1]);
      if (pf > 0.0) s += cw * cm * cell_q_mean(g, Q, i, 0) * pf;
    }
  } else {
    for (int j = 0; j + 1 < g.ny; ++j) {
      for (int i = 0; i + 1 < g.nx; ++i) {
        const double cw = g.cell_weight[g.cell_index(i, j)];
        if (cw == 0.0) continue;
        const double pf = cell_positive_fraction_2d(
            u.v[g.node_index(i, j)], u.v[g.node_index(i + 1, j)],
            u.v[g.node_index(i, j + 1)], u.v[g.node_index(i + 1, j + 1)]);
        if (pf > 0.0) s += cw * cm * cell_q_mean(g, Q, i, j) * pf;
      }
    }
  }
  return lambda2 * s;
}

double relaxed_m2(const Field& u, const QField& Q, double lambda2, double eps) {
  const Grid& g = u.grid;
  double s = 0.0;
  for (int idx = 0; idx < g.num_nodes(); ++idx) {
    if (g.mask[idx] == NodeClass::Exterior) continue;
    const double t = u.v[idx] / eps;
    const double heps = t <= 0.0 ? 0.0 : (t >= 1.0 ? 1.0 : t);
    if (heps > 0.0) s += g.node_weight[idx] * Q.at(idx) * heps;
  }
  return lambda2 * s;
}

}  // namespace

double weighted_volume_m2(const Field& u, const QField& Q, double lambda2, double eps) {
  if (eps < 0.0) throw std::invalid_argument("weighted_volume_m2: negative eps");
  check_finite(u);
  return eps == 0.0 ? sharp_m2(u, Q, lambda2) : relaxed_m2(u, Q, lambda2, eps);
}

void relaxed_volume_gradient(const Field& u, const QField& Q, double lambda2,
                             double eps, std::vector<double>& grad) {
  if (!(eps > 0.0)) throw std::invalid_argument("relaxed_volume_gradient: eps must be > 0");
  const Grid& g = u.grid;
  grad.assign(g.num_nodes(), 0.0);
  for (int idx = 0; idx < g.num_nodes(); ++idx) {
    if (g.mask[idx] == NodeClass::Exterior) continue;
    if (u.v[idx] > 0.0 && u.v[idx] < eps)
      grad[idx] = lambda2 * g.node_weight[idx] * Q.at(idx) / eps;
  }
}

void sharp_volume_gradient(const Field& u, const QField& Q, double lambda2,
                           std::vector<double>& grad) {
  const Grid& g = u.grid;
  grad.assign(g.num_nodes(), 0.0);
  const double cm = std::pow(g.h, g.dim);
  if (g.dim == 1) {
    for (int i = 0; i + 1 < g.nx; ++i) {
      const double cw = g.cell_weight[i];
      if (cw == 0.0) continue;
      const double a = u.v[i], b = u.v[i + 1];
      if ((a > 0.0) == (b > 0.0)) continue;  // fraction locally constant
      const double w = lambda2 * cw * cm * cell_q_mean(g, Q, i, 0);
      const double del = 1e-7 * (1.0 + std::max(std::abs(a), std::abs(b)));
      grad[i] += w * (cell_positive_fraction_1d(a + del, b) -
                      cell_positive_fraction_1d(a - del, b)) / (2.0 * del);
      grad[i + 1] += w * (cell_positive_fraction_1d(a, b + del) -
                          cell_positive_fraction_1d(a, b - del)) / (2.0 * del);
    }
    return;
  }
  for (int j = 0; j + 1 < g.ny; ++j) {
    for (int i = 0; i + 1 < g.nx; ++i) {
      const double cw = g.cell_weight[g.cell_index(i, j)];
      if (cw == 0.0) continue;
      const int id4[4] = {g.node_index(i, j), g.node_index(i + 1, j),
                          g.node_index(i, j + 1), g.node_index(i + 1, j + 1)};
      double v[4] = {u.v[id4[0]], u.v[id4[1]], u.v[id4[2]], u.v[id4[3]]};
      const bool p0 = v[0] > 0.0;
      if ((v[1] > 0.0) == p0 && (v[2] > 0.0) == p0 && (v[3] > 0.0) == p0) continue;
      const double w = lambda2 * cw * cm * cell_q_mean(g, Q, i, j);
      const double scale = std::max({std::abs(v[0]), std::abs(v[1]),
                                     std::abs(v[2]), std::abs(v[3])});
      const double del = 1e-7 * (1.0 + scale);
      for (int k = 0; k < 4; ++k) {
        const double keep = v[k];
        v[k] = keep + del;
        const double hi = cell_positive_fraction_2d(v[0], v[1], v[2], v[3]);
        v[k] = keep - del;
        const double lo = cell_positive_fraction_2d(v[0], v[1], v[2], v[3]);
        v[k] = keep;
        grad[id4[k]] += w * (hi - lo) / (2.0 * del);
      }
    }
  }
}

double weighted_volume_m1(double m2, double lambda1, double lambda2, double lam_omega) {
  const double cap = lambda2 * lam_omega;
  const double tol = 1e-9 * std::max(1.0, cap);
  if (m2 < -tol || m2 > cap + tol)
    throw std::domain_error("weighted_volume_m1: m2 outside [0, lambda2*lambda_omega]");
  m2 = std::min(std::max(m2, 0.0), cap);
  return lambda1 * (lam_omega - m2 / lambda2);
}

EnergyBreakdown total_energy(const Field& u, const QField& Q, const PhiSpec& phi,
                             double eps) {
  const PhiSpec ph = attach_domain(phi, u.grid, Q);
  EnergyBreakdown b;
  b.eps = eps;
  b.dirichlet = dirichlet_energy(u);
  b.m2 = weighted_volume_m2(u, Q, ph.lambda2, eps);
  b.m1 = weighted_volume_m1(b.m2, ph.lambda1, ph.lambda2, ph.lambda_omega);
  b.volume_term = ph.phi0(b.m2);
  b.total = b.dirichlet + b.volume_term;
  return b;
}

PhiSpec attach_domain(const PhiSpec& phi, const Grid& g, const QField& Q) {
  PhiSpec p = phi;
  p.lambda_omega = lambda_omega(g, Q);
  return p;
}

}  // namespace fblab
