#pragma once
// Structured 1D/2D node grids with a domain mask and precomputed quadrature
// weights. Grids are value types; fields copy them freely at the sizes used here.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fblab {

enum class NodeClass : std::uint8_t { Exterior = 0, Interior = 1, Boundary = 2 };

enum class DomainShape : std::uint8_t { Interval, Rectangle, Disk };

struct Grid {
  int dim = 1;
  int nx = 0, ny = 1;     // nodes per axis (ny == 1 in 1D)
  double h = 0.0;         // uniform, isotropic spacing
  double ox = 0.0, oy = 0.0;
  DomainShape shape = DomainShape::Interval;
  // Disk parameters (unused otherwise).
  double cx = 0.0, cy = 0.0, radius = 0.0;

  std::vector<NodeClass> mask;       // per node, row-major (j * nx + i)
  std::vector<double> cell_weight;   // per cell in [0,1]; clipped area fraction
  std::vector<double> node_weight;   // per node; share of adjacent cell weights

  int num_nodes() const { return nx * ny; }
  int num_cells() const { return dim == 1 ? nx - 1 : (nx - 1) * (ny - 1); }
  int node_index(int i, int j = 0) const { return j * nx + i; }
  int cell_index(int i, int j = 0) const { return dim == 1 ? i : j * (nx - 1) + i; }

  double x(int i) const { return ox + h * i; }
  double y(int j) const { return oy + h * j; }

  NodeClass at(int i, int j = 0) const { return mask[node_index(i, j)]; }
  bool is_exterior(int i, int j = 0) const { return at(i, j) == NodeClass::Exterior; }
  bool is_interior(int i, int j = 0) const { return at(i, j) == NodeClass::Interior; }
  bool is_boundary(int i, int j = 0) const { return at(i, j) == NodeClass::Boundary; }

  // Cell is active when all its corners are non-exterior.
  bool cell_active(int i, int j = 0) const {
    if (dim == 1) return !is_exterior(i) && !is_exterior(i + 1);
    return !is_exterior(i, j) && !is_exterior(i + 1, j) && !is_exterior(i, j + 1) &&
           !is_exterior(i + 1, j + 1);
  }

  double cell_measure() const { return dim == 1 ? h : h * h; }
};

Grid make_interval(int nodes, double a = 0.0, double b = 1.0);
Grid make_rectangle(int nodes_x, int nodes_y, double ax, double ay, double bx, double by);
Grid make_disk(int nodes_per_axis, double cx = 0.0, double cy = 0.0, double radius = 1.0);

std::string shape_name(DomainShape s);

}  // namespace fblab
