#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "contactlab/numerics/operator.hpp"
#include "contactlab/twobody/potential.hpp"

namespace contactlab {

struct BSKernel {
  double z = 0.0;
  Eigen::MatrixXd matrix;             // sqrt(u) (H + z)^-1 sqrt(u) on the support
  std::vector<std::size_t> support;   // grid indices with u > 0
  std::string potential_meta;
};

// u >= 0 is the sign-flipped potential. h_base is the symmetrized radial
// operator (e.g. radial_hamiltonian(grid, {})).
BSKernel bs_kernel(const TridiagonalOperator& h_base, const RadialField& u, double z,
                   std::string potential_meta = {});
double max_eigenvalue(const BSKernel& k);
// Number of eigenvalues of K(z) above 1.
std::size_t count_above_one(const BSKernel& k);

// z* > 0 with max eigenvalue of K(z*) = 1, i.e. -z* is the ground energy of
// h_base - u. Throws NumericalError when no bound state exists.
double bs_crossing(const TridiagonalOperator& h_base, const RadialField& u);

// V = V1 (strong class) + V2 (weak class) + V3 (unscaled).
struct CompositePotential {
  PotentialSpec v1{SquareWell{}, 0.0, ScalingClass::strong, 1.0};
  PotentialSpec v2{SquareWell{}, 0.0, ScalingClass::weak, 1.0};
  PotentialSpec v3{SquareWell{}, 0.0, ScalingClass::unscaled, 1.0};

  void validate() const;
  // Components with epsilon applied to v1 and v2.
  std::vector<PotentialSpec> at(double eps) const;
  RadialField realize(double eps, const RadialGrid& grid) const;
};

// R(z) - R0(z) = [R0 B] (1 - Q)^-1 [B R0], B = sqrt(-V), Q = B R0 B, in the
// symmetrized grid basis. Throws InvertibilityError when ||Q|| >= 1.
Eigen::MatrixXd kk_correction(const CompositePotential& c, double eps, double z, const RadialGrid& grid);
// Same identity for an already realized potential.
Eigen::MatrixXd kk_correction(const RadialField& v, double z);
// (H + z)^-1 - (H0 + z)^-1 by dense inversion.
Eigen::MatrixXd resolvent_difference_dense(const RadialField& v, double z);

// int sqrt|V1^eps| sqrt|V2^eps + V3| d^3y by adaptive quadrature.
double cross_term_norm(const CompositePotential& c, double eps);

struct SweepOptions {
  RadialGrid grid = RadialGrid::make(4000, 0.0025, 10.0, SpacingLaw::uniform);
  double bs_z = 1.0;             // spectral parameter for the kernel diagnostic
  double monotone_tol = 1e-8;
  bool extension_norms = true;
  bool bs_diagnostic = true;
};

struct EpsilonRecord {
  double epsilon = 0.0;
  double ground_eigenvalue = 0.0;
  std::size_t negative_count = 0;
  ExtensionNorms norms;
  double bs_max_eigenvalue = 0.0;
  double cross_term_norm = 0.0;
};

struct EpsilonSweepReport {
  std::vector<double> epsilons;
  std::vector<EpsilonRecord> per_epsilon;
  std::vector<double> cauchy_gaps;
  bool monotone_flag = false;
  bool gaps_decreasing = false;
};

EpsilonSweepReport epsilon_sweep(const CompositePotential& c, const std::vector<double>& epsilons,
                                 const SweepOptions& opt = {});

// Ground-energy shift caused by v3 at each epsilon (v3 present minus absent).
std::vector<double> v3_shift_sequence(const CompositePotential& c, const std::vector<double>& epsilons,
                                      const RadialGrid& grid);

}  // namespace contactlab
