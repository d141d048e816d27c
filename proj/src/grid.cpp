#include "fblab/grid.hpp"

namespace fblab {

namespace {

void finalize_weights(Grid& g) {
  const int ncells = g.num_cells();
  if (g.cell_weight.empty()) g.cell_weight.assign(ncells, 0.0);
  g.node_weight.assign(g.num_nodes(), 0.0);
  if (g.dim == 1) {
    for (int i = 0; i < g.nx - 1; ++i) {
      if (!g.cell_active(i)) { g.cell_weight[i] = 0.0; continue; }
      const double w = g.cell_weight[i];
      g.node_weight[i] += 0.5 * w * g.h;
      g.node_weight[i + 1] += 0.5 * w * g.h;
    }
  } else {
    for (int j = 0; j < g.ny - 1; ++j)
      for (int i = 0; i < g.nx - 1; ++i) {
        const int c = g.cell_index(i, j);
        if (!g.cell_active(i, j)) { g.cell_weight[c] = 0.0; continue; }
        const double w = 0.25 * g.cell_weight[c] * g.h * g.h;
        g.node_weight[g.node_index(i, j)] += w;
        g.node_weight[g.node_index(i + 1, j)] += w;
        g.node_weight[g.node_index(i, j + 1)] += w;
        g.node_weight[g.node_index(i + 1, j + 1)] += w;
      }
  }
}

}  // namespace

Grid make_interval(int nodes, double a, double b) {
  if (nodes < 2 || b <= a) throw std::invalid_argument("make_interval: bad arguments");
  Grid g;
  g.dim = 1;
  g.nx = nodes;
  g.ny = 1;
  g.h = (b - a) / (nodes - 1);
  g.ox = a;
  g.shape = DomainShape::Interval;
  g.mask.assign(nodes, NodeClass::Interior);
  g.mask.front() = NodeClass::Boundary;
  g.mask.back() = NodeClass::Boundary;
  g.cell_weight.assign(nodes - 1, 1.0);
  finalize_weights(g);
  return g;
}

Grid make_rectangle(int nodes_x, int nodes_y, double ax, double ay, double bx, double by) {
  if (nodes_x < 2 || nodes_y < 2 || bx <= ax || by <= ay)
    throw std::invalid_argument("make_rectangle: bad arguments");
  const double hx = (bx - ax) / (nodes_x - 1);
  const double hy = (by - ay) / (nodes_y - 1);
  if (std::abs(hx - hy) > 1e-12 * std::max(hx, hy))
    throw std::invalid_argument("make_rectangle: spacing must be isotropic");
  Grid g;
  g.dim = 2;
  g.nx = nodes_x;
  g.ny = nodes_y;
  g.h = hx;
  g.ox = ax;
  g.oy = ay;
  g.shape = DomainShape::Rectangle;
  g.mask.assign(g.num_nodes(), NodeClass::Interior);
  for (int i = 0; i < nodes_x; ++i) {
    g.mask[g.node_index(i, 0)] = NodeClass::Boundary;
    g.mask[g.node_index(i, nodes_y - 1)] = NodeClass::Boundary;
  }
  for (int j = 0; j < nodes_y; ++j) {
    g.mask[g.node_index(0, j)] = NodeClass::Boundary;
    g.mask[g.node_index(nodes_x - 1, j)] = NodeClass::Boundary;
  }
  g.cell_weight.assign(g.num_cells(), 1.0);
  finalize_weights(g);
  return g;
}

Grid make_disk(int nodes_per_axis, double cx, double cy, double radius) {
  if (nodes_per_axis < 4 || radius <= 0.0)
    throw std::invalid_argument("make_disk: bad arguments");
  Grid g;
  g.dim = 2;
  g.nx = g.ny = nodes_per_axis;
  // Grid covers the bounding square of the disk.
  g.h = 2.0 * radius / (nodes_per_axis - 1);
  g.ox = cx - radius;
  g.oy = cy - radius;
  g.shape = DomainShape::Disk;
  g.cx = cx;
  g.cy = cy;
  g.radius = radius;

  const int n = nodes_per_axis;
  g.mask.assign(g.num_nodes(), NodeClass::Exterior);
  auto inside = [&](int i, int j) {
    const double dx = g.x(i) - cx, dy = g.y(j) - cy;
    return dx * dx + dy * dy < radius * radius;
  };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (inside(i, j)) g.mask[g.node_index(i, j)] = NodeClass::Interior;
  // Boundary = non-interior corners of cells that contain an interior node.
  for (int j = 0; j < n - 1; ++j)
    for (int i = 0; i < n - 1; ++i) {
      const int corners[4] = {g.node_index(i, j), g.node_index(i + 1, j),
                              g.node_index(i, j + 1), g.node_index(i + 1, j + 1)};
      bool has_interior = false;
      for (int c : corners) has_interior |= (g.mask[c] == NodeClass::Interior);
      if (!has_interior) continue;
      for (int c : corners)
        if (g.mask[c] == NodeClass::Exterior) g.mask[c] = NodeClass::Boundary;
    }
  // Clipped cell weights by corner count inside the circle.
  g.cell_weight.assign(g.num_cells(), 0.0);
  for (int j = 0; j < n - 1; ++j)
    for (int i = 0; i < n - 1; ++i) {
      if (!g.cell_active(i, j)) continue;
      int cnt = 0;
      cnt += inside(i, j) ? 1 : 0;
      cnt += inside(i + 1, j) ? 1 : 0;
      cnt += inside(i, j + 1) ? 1 : 0;
      cnt += inside(i + 1, j + 1) ? 1 : 0;
      g.cell_weight[g.cell_index(i, j)] = 0.25 * cnt;
    }
  finalize_weights(g);
  return g;
}

std::string shape_name(DomainShape s) {
  switch (s) {
    case DomainShape::Interval: return "interval";
    case DomainShape::Rectangle: return "rectangle";
    case DomainShape::Disk: return "disk";
  }
  return "?";
}

}  // namespace fblab
