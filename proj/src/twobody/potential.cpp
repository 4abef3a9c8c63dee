#include <algorithm>
#include <cmath>
#include <string>

#include "contactlab/error.hpp"
#include "contactlab/twobody/potential.hpp"

namespace contactlab {

std::string to_string(ScalingClass c) {
  switch (c) {
    case ScalingClass::strong: return "strong";
    case ScalingClass::weak: return "weak";
    default: return "unscaled";
  }
}

ScalingClass scaling_class_from_string(const std::string& s) {
  if (s == "strong") return ScalingClass::strong;
  if (s == "weak") return ScalingClass::weak;
  if (s == "unscaled") return ScalingClass::unscaled;
  throw ValidationError("scaling_class", "unknown scaling class '" + s + "'");
}

namespace {

struct ShapeCheck {
  void operator()(const SquareWell& s) const {
    if (!(s.R > 0) || !std::isfinite(s.R)) throw ValidationError("shape_param", "square well radius must be positive");
  }
  void operator()(const Gaussian& s) const {
    if (!(s.sigma > 0) || !std::isfinite(s.sigma)) throw ValidationError("shape_param", "gaussian width must be positive");
  }
  void operator()(const UserTable& t) const {
    if (t.r.size() < 2 || t.r.size() != t.v.size())
      throw ValidationError("table_shape", "user table needs matching r and v columns with at least 2 rows");
    if (t.r[0] < 0) throw ValidationError("table_shape", "user table radii must be nonnegative");
    for (std::size_t i = 0; i < t.r.size(); ++i) {
      if (!std::isfinite(t.r[i]) || !std::isfinite(t.v[i])) throw ValidationError("table_shape", "user table has non-finite entries");
      if (t.v[i] < 0) throw ValidationError("table_shape", "shape values must be nonnegative (potential is -g*shape)");
      if (i > 0 && !(t.r[i] > t.r[i - 1])) throw ValidationError("table_shape", "user table radii must increase");
    }
    if (!(t.r.back() > 0)) throw ValidationError("table_shape", "user table must extend past r = 0");
  }
};

}  // namespace

double shape_value(const Shape& s, double x) {
  if (const auto* w = std::get_if<SquareWell>(&s)) return x <= w->R ? 1.0 : 0.0;
  if (const auto* gs = std::get_if<Gaussian>(&s)) {
    const double t = x / gs->sigma;
    return std::exp(-t * t);
  }
  const auto& t = std::get<UserTable>(s);
  if (x <= t.r.front()) return t.v.front();
  if (x >= t.r.back()) return t.v.back();
  const auto it = std::upper_bound(t.r.begin(), t.r.end(), x);
  const std::size_t j = static_cast<std::size_t>(it - t.r.begin());
  const double f = (x - t.r[j - 1]) / (t.r[j] - t.r[j - 1]);
  return t.v[j - 1] + f * (t.v[j] - t.v[j - 1]);
}

double shape_extent(const Shape& s) {
  if (const auto* w = std::get_if<SquareWell>(&s)) return w->R;
  if (const auto* gs = std::get_if<Gaussian>(&s)) return gs->sigma;
  return std::get<UserTable>(s).r.back();
}

void PotentialSpec::validate() const {
  std::visit(ShapeCheck{}, shape);
  if (!(coupling >= 0) || !std::isfinite(coupling)) throw ValidationError("coupling", "coupling must be finite and >= 0");
  if (!(epsilon > 0 && epsilon <= 1)) throw ValidationError("epsilon", "epsilon must lie in (0, 1]");
}

double PotentialSpec::amplitude() const {
  switch (scaling) {
    case ScalingClass::strong: return coupling / (epsilon * epsilon * epsilon);
    case ScalingClass::weak: return coupling / (epsilon * epsilon);
    default: return coupling;
  }
}

double PotentialSpec::support_scale() const {
  return (scaling == ScalingClass::unscaled ? 1.0 : epsilon) * shape_extent(shape);
}

namespace {
double length_scale(const PotentialSpec& p) { return p.scaling == ScalingClass::unscaled ? 1.0 : p.epsilon; }
}  // namespace

double PotentialSpec::value(double r) const {
  if (coupling == 0.0) return 0.0;
  return -amplitude() * shape_value(shape, r / length_scale(*this));
}

std::vector<double> PotentialSpec::breakpoints() const {
  const double s = length_scale(*this);
  std::vector<double> out;
  if (const auto* w = std::get_if<SquareWell>(&shape)) out.push_back(s * w->R);
  else if (const auto* t = std::get_if<UserTable>(&shape))
    for (double r : t->r)
      if (r > 0) out.push_back(s * r);
  return out;
}

double PotentialSpec::integration_end() const {
  const double s = length_scale(*this);
  // exp(-74) is far below any tolerance we quote
  if (const auto* gs = std::get_if<Gaussian>(&shape)) return s * gs->sigma * 8.6;
  return s * shape_extent(shape);
}

RadialField realize_potential(const PotentialSpec& spec, const RadialGrid& grid) {
  spec.validate();
  const std::size_t n = grid.n();
  std::vector<double> v(n, 0.0);
  if (spec.coupling == 0.0) return RadialField(grid, std::move(v));
  const double support = spec.support_scale();
  const std::size_t inside = grid.count_at_or_below(support);
  if (inside < 8)
    throw ValidationError("under_resolved", "only " + std::to_string(inside) + " grid nodes inside r <= " +
                                                std::to_string(support) + " (need 8)");
  const auto& gaps = grid.gaps();
  const bool well = std::holds_alternative<SquareWell>(spec.shape);
  const double amp = spec.amplitude();
  for (std::size_t i = 0; i < n; ++i) {
    const double r = grid[i];
    if (well) {
      const double lo = r - 0.5 * gaps[i], hi = r + 0.5 * gaps[i + 1];
      if (lo < support && support < hi) {
        v[i] = -amp * (support - lo) / (hi - lo);
        continue;
      }
    }
    v[i] = spec.value(r);
  }
  return RadialField(grid, std::move(v));
}

}  // namespace contactlab
