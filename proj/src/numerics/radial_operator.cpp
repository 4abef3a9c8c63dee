#include "contactlab/numerics/radial_operator.hpp"

#include <cmath>

#include "contactlab/error.hpp"

namespace contactlab {

TridiagonalOperator radial_hamiltonian(const RadialGrid& grid, std::span<const double> potential,
                                       OuterBoundary outer) {
  const std::size_t n = grid.n();
  if (!potential.empty() && potential.size() != n)
    throw ValidationError("potential_size", "potential does not match grid");
  const auto& g = grid.gaps();
  const auto& w = grid.weights();
  std::vector<double> diag(n), off(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    double right = 1.0 / g[i + 1];
    if (i + 1 == n && outer == OuterBoundary::neumann) right = 0.0;
    diag[i] = (1.0 / g[i] + right) / w[i] + (potential.empty() ? 0.0 : potential[i]);
  }
  for (std::size_t i = 0; i + 1 < n; ++i) off[i] = -1.0 / (g[i + 1] * std::sqrt(w[i] * w[i + 1]));
  return TridiagonalOperator(std::move(diag), std::move(off));
}

}  // namespace contactlab
