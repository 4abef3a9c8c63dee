#pragma once

#include <span>

#include "contactlab/numerics/operator.hpp"
#include "contactlab/numerics/radial_grid.hpp"

namespace contactlab {

enum class OuterBoundary { dirichlet, neumann };

// -d^2/dr^2 + V on the grid nodes, three-point stencil on possibly uneven
// spacing, symmetrized with the dual-cell weights (unknowns are sqrt(w_i) u_i).
// Dirichlet data sit at the grid's lower/upper boundary points.
TridiagonalOperator radial_hamiltonian(const RadialGrid& grid, std::span<const double> potential,
                                       OuterBoundary outer = OuterBoundary::dirichlet);

}  // namespace contactlab
