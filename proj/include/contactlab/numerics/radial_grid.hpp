#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace contactlab {

enum class SpacingLaw { uniform, logarithmic };

std::string_view to_string(SpacingLaw law);
SpacingLaw spacing_law_from_string(std::string_view s);

// Half-line grid. Nodes carry the unknowns; the two boundary points just
// outside the node range carry homogeneous Dirichlet data for FD operators.
class RadialGrid {
 public:
  static RadialGrid make(std::size_t n, double r_min, double r_max, SpacingLaw law);

  std::size_t n() const noexcept { return nodes_.size(); }
  double r_min() const noexcept { return r_min_; }
  double r_max() const noexcept { return r_max_; }
  SpacingLaw law() const noexcept { return law_; }
  std::span<const double> nodes() const noexcept { return nodes_; }
  double operator[](std::size_t i) const noexcept { return nodes_[i]; }

  // Boundary point below nodes[0] (clamped at r = 0) and above nodes[n-1].
  double lower_boundary() const noexcept { return lower_; }
  double upper_boundary() const noexcept { return upper_; }
  // Uniform step, or the log step ln(nodes[1]/nodes[0]).
  double step() const noexcept { return step_; }
  // Dual-cell widths (h_{i-1} + h_i)/2 including the boundary gaps.
  const std::vector<double>& weights() const noexcept { return weights_; }
  // Distance from node i to node i+1, i in [-1, n-1] stored at index i+1.
  const std::vector<double>& gaps() const noexcept { return gaps_; }

  RadialGrid dilated(double s) const;
  std::size_t count_at_or_below(double r) const;

 private:
  RadialGrid() = default;
  void finish();

  std::vector<double> nodes_;
  std::vector<double> gaps_;
  std::vector<double> weights_;
  double r_min_ = 0.0, r_max_ = 0.0, step_ = 0.0, lower_ = 0.0, upper_ = 0.0;
  SpacingLaw law_ = SpacingLaw::uniform;
};

struct RadialField {
  RadialGrid grid;
  std::vector<double> values;
  unsigned angular_momentum = 0;

  RadialField(RadialGrid g, std::vector<double> v, unsigned ell = 0);
};

}  // namespace contactlab
