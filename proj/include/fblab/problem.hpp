#pragma once
// One minimization instance: domain, boundary datum, weight, nonlinearity.

#include "fblab/energy.hpp"
#include "fblab/field.hpp"
#include "fblab/grid.hpp"
#include "fblab/phi.hpp"

namespace fblab {

struct Problem {
  Grid grid;
  Field datum;  // full field; boundary nodes supply the Dirichlet trace
  QField q;
  PhiSpec phi;

  // phi with lambda_omega attached; call after construction.
  PhiSpec phi0() const { return attach_domain(phi, grid, q); }
};

inline Problem make_problem(const Grid& g, const Field& datum, const QField& q,
                            const PhiSpec& phi) {
  return Problem{g, datum, q, phi};
}

}  // namespace fblab
