#include "fblab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fblab {

namespace {
int g_threads = 1;  // default serial: single-threaded runs are the reproducible baseline
}

int hardware_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : (int)n;
#endif
}

void set_threads(int n) {
  g_threads = std::max(1, n);
#ifdef _OPENMP
  omp_set_num_threads(g_threads);
#endif
}

int current_threads() { return g_threads; }

LaplaceSystem build_laplace(const Grid& g, const std::vector<std::uint8_t>& pinned) {
  LaplaceSystem sys;
  sys.g = &g;
  sys.pinned = pinned;
  sys.pinned.resize(g.num_nodes(), 0);
  sys.diag.assign(g.num_nodes(), 0.0);
  auto cw = [&](int i, int j) -> double {
    if (i < 0 || j < 0 || i + 1 >= g.nx || (g.dim == 2 && j + 1 >= g.ny)) return 0.0;
    return g.dim == 1 ? g.cell_weight[i] : g.cell_weight[g.cell_index(i, j)];
  };
  if (g.dim == 1) {
    sys.cx.assign(g.nx - 1, 0.0);
    for (int i = 0; i + 1 < g.nx; ++i) {
      const double c = cw(i, 0) / g.h;
      sys.cx[i] = c;
      sys.diag[i] += c;
      sys.diag[i + 1] += c;
    }
  } else {
    sys.cx.assign((size_t)(g.nx - 1) * g.ny, 0.0);
    sys.cy.assign((size_t)g.nx * (g.ny - 1), 0.0);
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i + 1 < g.nx; ++i) {
        const double c = 0.5 * (cw(i, j - 1) + cw(i, j));
        sys.cx[(size_t)j * (g.nx - 1) + i] = c;
        sys.diag[g.node_index(i, j)] += c;
        sys.diag[g.node_index(i + 1, j)] += c;
      }
    }
    for (int j = 0; j + 1 < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        const double c = 0.5 * (cw(i - 1, j) + cw(i, j));
        sys.cy[(size_t)j * g.nx + i] = c;
        sys.diag[g.node_index(i, j)] += c;
        sys.diag[g.node_index(i, j + 1)] += c;
      }
    }
  }
  for (int idx = 0; idx < g.num_nodes(); ++idx)
    if (g.mask[idx] == NodeClass::Exterior || sys.diag[idx] <= 0.0) sys.pinned[idx] = 1;
  return sys;
}

namespace {

// Gauss-Seidel update of one node; returns |change|.
inline double update_node_2d(const LaplaceSystem& sys, std::vector<double>& u,
                             int i, int j, double omega) {
  const Grid& g = *sys.g;
  const int idx = g.node_index(i, j);
  if (sys.pinned[idx]) return 0.0;
  double num = 0.0;
  if (i > 0) num += sys.cx[(size_t)j * (g.nx - 1) + (i - 1)] * u[idx - 1];
  if (i + 1 < g.nx) num += sys.cx[(size_t)j * (g.nx - 1) + i] * u[idx + 1];
  if (j > 0) num += sys.cy[(size_t)(j - 1) * g.nx + i] * u[idx - g.nx];
  if (j + 1 < g.ny) num += sys.cy[(size_t)j * g.nx + i] * u[idx + g.nx];
  const double target = num / sys.diag[idx];
  const double next = (1.0 - omega) * u[idx] + omega * target;
  const double ch = std::abs(next - u[idx]);
  u[idx] = next;
  return ch;
}

inline double update_node_1d(const LaplaceSystem& sys, std::vector<double>& u,
                             int i, double omega) {
  const Grid& g = *sys.g;
  if (sys.pinned[i]) return 0.0;
  double num = 0.0;
  if (i > 0) num += sys.cx[i - 1] * u[i - 1];
  if (i + 1 < g.nx) num += sys.cx[i] * u[i + 1];
  const double target = num / sys.diag[i];
  const double next = (1.0 - omega) * u[i] + omega * target;
  const double ch = std::abs(next - u[i]);
  u[i] = next;
  return ch;
}

}  // namespace

double sor_sweep(const LaplaceSystem& sys, std::vector<double>& u, double omega,
                 bool parallel) {
  const Grid& g = *sys.g;
  double sup = 0.0;
  if (g.dim == 1) {
    for (int color = 0; color < 2; ++color)
      for (int i = color; i < g.nx; i += 2)
        sup = std::max(sup, update_node_1d(sys, u, i, omega));
    return sup;
  }
#ifdef _OPENMP
  if (parallel && g_threads > 1) {
    for (int color = 0; color < 2; ++color) {
      double csup = 0.0;
#pragma omp parallel for schedule(static) reduction(max : csup)
      for (int j = 0; j < g.ny; ++j) {
        double row = 0.0;
        for (int i = (color + j) % 2; i < g.nx; i += 2)
          row = std::max(row, update_node_2d(sys, u, i, j, omega));
        csup = std::max(csup, row);
      }
      sup = std::max(sup, csup);
    }
    return sup;
  }
#else
  (void)parallel;
#endif
  for (int color = 0; color < 2; ++color)
    for (int j = 0; j < g.ny; ++j)
      for (int i = (color + j) % 2; i < g.nx; i += 2)
        sup = std::max(sup, update_node_2d(sys, u, i, j, omega));
  return sup;
}

double laplace_residual(const LaplaceSystem& sys, const std::vector<double>& u) {
  const Grid& g = *sys.g;
  double worst = 0.0;
  if (g.dim == 1) {
    for (int i = 0; i < g.nx; ++i) {
      if (sys.pinned[i]) continue;
      double r = sys.diag[i] * u[i];
      if (i > 0) r -= sys.cx[i - 1] * u[i - 1];
      if (i + 1 < g.nx) r -= sys.cx[i] * u[i + 1];
      worst = std::max(worst, std::abs(r) / sys.diag[i]);
    }
    return worst;
  }
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const int idx = g.node_index(i, j);
      if (sys.pinned[idx]) continue;
      double r = sys.diag[idx] * u[idx];
      if (i > 0) r -= sys.cx[(size_t)j * (g.nx - 1) + (i - 1)] * u[idx - 1];
      if (i + 1 < g.nx) r -= sys.cx[(size_t)j * (g.nx - 1) + i] * u[idx + 1];
      if (j > 0) r -= sys.cy[(size_t)(j - 1) * g.nx + i] * u[idx - g.nx];
      if (j + 1 < g.ny) r -= sys.cy[(size_t)j * g.nx + i] * u[idx + g.nx];
      worst = std::max(worst, std::abs(r) / sys.diag[idx]);
    }
  }
  return worst;
}

void thomas_solve_1d(const LaplaceSystem& sys, std::vector<double>& u) {
  const Grid& g = *sys.g;
  if (g.dim != 1) throw std::logic_error("thomas_solve_1d: 1D only");
  const int n = g.nx;
  std::vector<double> a(n, 0.0), b(n, 1.0), c(n, 0.0), d(n, 0.0);
  for (int i = 0; i < n; ++i) {
    if (sys.pinned[i]) {
      d[i] = u[i];
      continue;
    }
    b[i] = sys.diag[i];
    if (i > 0) a[i] = -sys.cx[i - 1];
    if (i + 1 < n) c[i] = -sys.cx[i];
    d[i] = 0.0;
  }
  for (int i = 1; i < n; ++i) {
    const double m = a[i] / b[i - 1];
    b[i] -= m * c[i - 1];
    d[i] -= m * d[i - 1];
  }
  u[n - 1] = d[n - 1] / b[n - 1];
  for (int i = n - 2; i >= 0; --i) u[i] = (d[i] - c[i] * u[i + 1]) / b[i];
}

double dirichlet_energy_parallel(const Field& u) {
#ifdef _OPENMP
  const Grid& g = u.grid;
  if (g_threads > 1 && g.dim == 2) {
    double e = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : e)
    for (int j = 0; j < g.ny - 1; ++j) {
      double row = 0.0;
      for (int i = 0; i + 1 < g.nx; ++i) {
        const double cw = g.cell_weight[g.cell_index(i, j)];
        if (cw == 0.0) continue;
        const double a = u.v[g.node_index(i, j)];
        const double b = u.v[g.node_index(i + 1, j)];
        const double c = u.v[g.node_index(i, j + 1)];
        const double d = u.v[g.node_index(i + 1, j + 1)];
        row += cw * 0.5 * ((b - a) * (b - a) + (d - c) * (d - c) +
                           (c - a) * (c - a) + (d - b) * (d - b));
      }
      e += row;
    }
    return e;
  }
#endif
  return dirichlet_energy(u);
}

double relaxed_m2_parallel(const Field& u, const QField& q, double lambda2, double eps) {
#ifdef _OPENMP
  const Grid& g = u.grid;
  if (g_threads > 1 && eps > 0.0) {
    double s = 0.0;
    const int n = g.num_nodes();
#pragma omp parallel for schedule(static) reduction(+ : s)
    for (int idx = 0; idx < n; ++idx) {
      if (g.mask[idx] == NodeClass::Exterior) continue;
      const double t = u.v[idx] / eps;
      const double heps = t <= 0.0 ? 0.0 : (t >= 1.0 ? 1.0 : t);
      if (heps > 0.0) s += g.node_weight[idx] * q.at(idx) * heps;
    }
    return lambda2 * s;
  }
#endif
  return weighted_volume_m2(u, q, lambda2, eps);
}

}  // namespace fblab
