#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>

#include "contactlab/error.hpp"
#include "contactlab/twobody/potential.hpp"

namespace contactlab {
namespace {

constexpr double kQuadTol = 1e-11;

std::vector<double> pieces(const PotentialSpec& spec) {
  std::vector<double> cuts{0.0};
  for (double b : spec.breakpoints())
    if (b > cuts.back() && b < spec.integration_end()) cuts.push_back(b);
  cuts.push_back(spec.integration_end());
  return cuts;
}

template <class F>
double integrate(F&& f, const std::vector<double>& cuts) {
  static thread_local boost::math::quadrature::tanh_sinh<double> ts(12);
  double total = 0.0;
  for (std::size_t j = 0; j + 1 < cuts.size(); ++j)
    if (cuts[j + 1] > cuts[j]) total += ts.integrate(f, cuts[j], cuts[j + 1], kQuadTol);
  return total;
}

ExtensionNorms norms_of(const std::vector<PotentialSpec>& parts) {
  std::vector<PotentialSpec> live;
  for (const auto& p : parts) {
    p.validate();
    if (const auto* t = std::get_if<UserTable>(&p.shape); t && t->v.back() != 0.0)
      throw ValidationError("nonintegrable_table", "user table must end at zero (its constant tail is not integrable)");
    if (p.coupling != 0.0) live.push_back(p);
  }
  ExtensionNorms out;
  if (live.empty()) return out;
  std::vector<double> cuts{0.0};
  double end = 0.0;
  for (const auto& p : live) end = std::max(end, p.integration_end());
  for (const auto& p : live)
    for (double c : pieces(p)) cuts.push_back(c);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  auto absv = [&](double r) {
    double v = 0.0;
    for (const auto& p : live) v += p.value(r);
    return std::abs(v);
  };

  out.l1 = 4.0 * std::numbers::pi * integrate([&](double r) { return r * r * absv(r); }, cuts);

  // Angular integrals done in closed form:
  // int dO_x dO_y |x-y|^-2 = (8 pi^2 / (r s)) ln|(r+s)/(r-s)|.
  auto inner = [&](double r) {
    std::vector<double> c = cuts;
    c.insert(std::upper_bound(c.begin(), c.end(), r), r);
    return integrate([&](double s) { return s == r ? 0.0 : s * absv(s) * std::log(std::abs((r + s) / (r - s))); }, c);
  };
  out.rollnik = 8.0 * std::numbers::pi * std::numbers::pi * integrate([&](double r) { return r * absv(r) * inner(r); }, cuts);
  return out;
}

}  // namespace

ExtensionNorms extension_norms(const PotentialSpec& spec) { return norms_of({spec}); }

ExtensionNorms extension_norms(const std::vector<PotentialSpec>& parts) { return norms_of(parts); }

}  // namespace contactlab
