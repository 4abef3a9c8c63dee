#include "contactlab/numerics/radial_grid.hpp"

#include <algorithm>
#include <cmath>

#include "contactlab/error.hpp"

namespace contactlab {

std::string_view to_string(SpacingLaw law) { return law == SpacingLaw::uniform ? "uniform" : "logarithmic"; }

SpacingLaw spacing_law_from_string(std::string_view s) {
  if (s == "uniform") return SpacingLaw::uniform;
  if (s == "logarithmic" || s == "log") return SpacingLaw::logarithmic;
  throw ValidationError("grid_law", "unknown spacing law '" + std::string(s) + "'");
}

RadialGrid RadialGrid::make(std::size_t n, double r_min, double r_max, SpacingLaw law) {
  if (!(r_min > 0.0) || !std::isfinite(r_min))
    throw ValidationError("grid_r_min", "r_min must be positive and finite");
  if (!(r_max > r_min) || !std::isfinite(r_max))
    throw ValidationError("grid_r_max", "r_max must exceed r_min");
  if (n < 2) throw ValidationError("grid_n", "need at least 2 nodes");

  RadialGrid g;
  g.r_min_ = r_min;
  g.r_max_ = r_max;
  g.law_ = law;
  g.nodes_.resize(n);
  if (law == SpacingLaw::uniform) {
    const double h = (r_max - r_min) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) g.nodes_[i] = r_min + h * static_cast<double>(i);
    g.nodes_[n - 1] = r_max;
    g.step_ = h;
    g.lower_ = std::max(0.0, r_min - h);
    // r_min = h up to rounding should land exactly on the origin
    if (g.lower_ < 1e-12 * h) g.lower_ = 0.0;
    g.upper_ = r_max + h;
  } else {
    const double d = std::log(r_max / r_min) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) g.nodes_[i] = r_min * std::exp(d * static_cast<double>(i));
    g.nodes_[0] = r_min;
    g.nodes_[n - 1] = r_max;
    g.step_ = d;
    g.lower_ = r_min * std::exp(-d);
    g.upper_ = r_max * std::exp(d);
  }
  g.finish();
  return g;
}

void RadialGrid::finish() {
  const std::size_t n = nodes_.size();
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (!(nodes_[i + 1] > nodes_[i])) throw ValidationError("grid_resolution", "nodes collapse in floating point");
  gaps_.resize(n + 1);
  gaps_[0] = nodes_[0] - lower_;
  for (std::size_t i = 1; i < n; ++i) gaps_[i] = nodes_[i] - nodes_[i - 1];
  gaps_[n] = upper_ - nodes_[n - 1];
  weights_.resize(n);
  for (std::size_t i = 0; i < n; ++i) weights_[i] = 0.5 * (gaps_[i] + gaps_[i + 1]);
}

RadialGrid RadialGrid::dilated(double s) const {
  if (!(s > 0.0)) throw ValidationError("grid_dilation", "dilation factor must be positive");
  RadialGrid g = *this;
  for (auto& r : g.nodes_) r *= s;
  g.r_min_ *= s;
  g.r_max_ *= s;
  g.lower_ *= s;
  g.upper_ *= s;
  if (law_ == SpacingLaw::uniform) g.step_ *= s;
  g.finish();
  return g;
}

std::size_t RadialGrid::count_at_or_below(double r) const {
  return static_cast<std::size_t>(std::upper_bound(nodes_.begin(), nodes_.end(), r) - nodes_.begin());
}

RadialField::RadialField(RadialGrid g, std::vector<double> v, unsigned ell)
    : grid(std::move(g)), values(std::move(v)), angular_momentum(ell) {
  if (values.size() != grid.n()) throw ValidationError("field_size", "radial field size does not match grid");
  for (double x : values)
    if (!std::isfinite(x)) throw ValidationError("field_nonfinite", "radial field has non-finite entries");
}

}  // namespace contactlab
