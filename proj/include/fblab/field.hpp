#pragma once
// Scalar fields over a Grid plus multilinear interpolation.

#include <functional>
#include <limits>

#include "fblab/grid.hpp"

namespace fblab {

struct Field {
  Grid grid;
  std::vector<double> v;  // one value per node; exterior entries are ignored

  Field() = default;
  explicit Field(const Grid& g, double fill = 0.0) : grid(g), v(g.num_nodes(), fill) {}

  double& at(int i, int j = 0) { return v[grid.node_index(i, j)]; }
  double at(int i, int j = 0) const { return v[grid.node_index(i, j)]; }
};

// Builds a field by sampling f at every non-exterior node.
Field sample_field(const Grid& g, const std::function<double(double, double)>& f);

// Multilinear interpolation; x must land in a cell whose corners are all
// non-exterior (throws otherwise).
double interpolate(const Field& u, double px, double py = 0.0);

// True when (px,py) lies in an active cell of the mask.
bool point_in_mask(const Grid& g, double px, double py = 0.0);

void check_finite(const Field& u, const char* who = "field");

}  // namespace fblab
