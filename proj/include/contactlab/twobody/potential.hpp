#pragma once

#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "contactlab/numerics/eigen.hpp"
#include "contactlab/numerics/radial_grid.hpp"
#include "contactlab/numerics/radial_operator.hpp"

namespace contactlab {

struct SquareWell {
  double R = 1.0;
};
struct Gaussian {
  double sigma = 1.0;  // shape exp(-(r/sigma)^2)
};
// Piecewise-linear shape through (r, v); must start at r = 0 and end at v = 0.
struct UserTable {
  std::vector<double> r;
  std::vector<double> v;
};
using Shape = std::variant<SquareWell, Gaussian, UserTable>;

enum class ScalingClass { strong, weak, unscaled };

std::string to_string(ScalingClass c);
ScalingClass scaling_class_from_string(const std::string& s);

// Realized potential: -g * eps^-p * shape(r / eps), p = 3 / 2 / 0.
struct PotentialSpec {
  Shape shape = SquareWell{};
  double coupling = 1.0;
  ScalingClass scaling = ScalingClass::unscaled;
  double epsilon = 1.0;

  void validate() const;
  double amplitude() const;          // g * eps^-p
  double support_scale() const;      // eps * R_shape
  double value(double r) const;      // signed potential at r
  std::vector<double> breakpoints() const;  // kinks/jumps in r, plus the end of support
  double integration_end() const;    // beyond this |V| is negligible (exactly 0 for compact shapes)
};

double shape_value(const Shape& s, double x);
double shape_extent(const Shape& s);

struct ExtensionNorms {
  double l1 = 0.0;
  double rollnik = 0.0;
};

// Samples the scaled potential. A node whose dual cell straddles the square
// well edge carries the cell average, which keeps the two-body observables
// second order in the step.
RadialField realize_potential(const PotentialSpec& spec, const RadialGrid& grid);

// l1 = int |V| d^3x, rollnik = int int |V(x)||V(y)| / |x-y|^2, by adaptive quadrature.
ExtensionNorms extension_norms(const PotentialSpec& spec);
// Norms of the summed potential.
ExtensionNorms extension_norms(const std::vector<PotentialSpec>& parts);

// Negative s-wave eigenvalues of -d^2/dr^2 + V, ascending. negative_count is
// the exact inertia count; truncated is set when it exceeds req.k.
SpectrumResult bound_states_radial(const RadialField& pot, const EigenRequest& req,
                                   OuterBoundary outer = OuterBoundary::dirichlet);

struct ZeroEnergyFit {
  double slope;      // u ~ slope * r + intercept, (slope, intercept/L) normalized to unit length
  double intercept;
  double a() const { return -intercept / slope; }
  double inverse_a() const { return -slope / intercept; }
};

// Zero-energy solution of the same three-point scheme, fitted by a line over
// the outer quarter of [r_min, r_max].
ZeroEnergyFit zero_energy_fit(const RadialField& pot);
double scattering_length(const RadialField& pot);

struct ResonanceResult {
  double coupling;
  double inverse_a;
  int scan_points;
  int bisection_steps;
};

// Bisection on the zero-energy slope (the numerator of 1/a) over the bracket.
ResonanceResult tune_to_resonance(const PotentialSpec& shape, std::pair<double, double> bracket,
                                  const RadialGrid& grid);

}  // namespace contactlab
