#include "fblab/field.hpp"

#include <algorithm>
#include <cmath>

namespace fblab {

Field sample_field(const Grid& g, const std::function<double(double, double)>& f) {
  Field u(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (!g.is_exterior(i, j)) u.at(i, j) = f(g.x(i), g.y(j));
  return u;
}

namespace {

// Cell locating with clamping against roundoff at the domain edge.
int locate(double p, double o, double h, int nodes) {
  double t = (p - o) / h;
  int c = static_cast<int>(std::floor(t));
  c = std::clamp(c, 0, nodes - 2);
  return c;
}

}  // namespace

bool point_in_mask(const Grid& g, double px, double py) {
  const double tol = 1e-12 * std::max(1.0, std::abs(g.h) * g.nx);
  if (px < g.ox - tol || px > g.x(g.nx - 1) + tol) return false;
  if (g.dim == 2 && (py < g.oy - tol || py > g.y(g.ny - 1) + tol)) return false;
  const int i = locate(px, g.ox, g.h, g.nx);
  const int j = g.dim == 2 ? locate(py, g.oy, g.h, g.ny) : 0;
  return g.cell_active(i, j);
}

double interpolate(const Field& u, double px, double py) {
  const Grid& g = u.grid;
  if (!point_in_mask(g, px, py))
    throw std::domain_error("interpolate: point outside mask");
  const int i = locate(px, g.ox, g.h, g.nx);
  const double s = std::clamp((px - g.x(i)) / g.h, 0.0, 1.0);
  if (g.dim == 1) return (1.0 - s) * u.at(i) + s * u.at(i + 1);
  const int j = locate(py, g.oy, g.h, g.ny);
  const double t = std::clamp((py - g.y(j)) / g.h, 0.0, 1.0);
  return (1.0 - s) * (1.0 - t) * u.at(i, j) + s * (1.0 - t) * u.at(i + 1, j) +
         (1.0 - s) * t * u.at(i, j + 1) + s * t * u.at(i + 1, j + 1);
}

void check_finite(const Field& u, const char* who) {
  const Grid& g = u.grid;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (!g.is_exterior(i, j) && !std::isfinite(u.at(i, j)))
        throw std::invalid_argument(std::string(who) + ": non-finite field value");
}

}  // namespace fblab
