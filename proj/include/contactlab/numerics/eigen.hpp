#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "contactlab/numerics/operator.hpp"

namespace contactlab {

enum class Which { smallest_algebraic };

struct EigenRequest {
  std::size_t k = 1;
  double tol = 1e-9;  // residual target, floored at 32 eps |A| (rounding limit)
  std::size_t max_iter = 5000;  // total Lanczos steps across all passes
  Which which = Which::smallest_algebraic;
  unsigned long long seed = 0;
  bool want_vectors = false;
};

struct GridMeta {
  std::string law;
  std::size_t n = 0;
  double r_min = 0.0;
  double r_max = 0.0;
};

struct SpectrumResult {
  std::vector<double> eigenvalues;  // ascending
  std::vector<double> residuals;    // |Av - lambda v| for unit v
  std::vector<std::vector<double>> vectors;
  std::size_t negative_count = 0;
  bool truncated = false;
  GridMeta grid_meta;
  std::size_t iterations = 0;
  std::size_t factorizations = 0;
};

// k algebraically smallest eigenpairs by shift-invert Lanczos with full
// reorthogonalization, locking, and inertia checks so no eigenvalue below the
// returned ones is skipped. negative_count counts returned values below zero.
SpectrumResult eigs_smallest(const SymmetricOperator& op, const EigenRequest& req);

// All eigenvalues strictly below `upper`, at most req.k of them (truncated is
// set when more exist). negative_count is the exact inertia count below 0.
SpectrumResult eigs_below(const SymmetricOperator& op, double upper, const EigenRequest& req);

}  // namespace contactlab
