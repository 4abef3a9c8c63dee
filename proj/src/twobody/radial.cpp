#include <algorithm>
#include <cmath>
#include <string>

#include "contactlab/error.hpp"
#include "contactlab/twobody/potential.hpp"

namespace contactlab {

SpectrumResult bound_states_radial(const RadialField& pot, const EigenRequest& req, OuterBoundary outer) {
  if (pot.angular_momentum != 0) throw ValidationError("angular_momentum", "only s-wave (l = 0) is supported");
  const auto op = radial_hamiltonian(pot.grid, pot.values, outer);
  SpectrumResult res = eigs_below(op, 0.0, req);
  res.grid_meta = {std::string(to_string(pot.grid.law())), pot.grid.n(), pot.grid.r_min(), pot.grid.r_max()};
  return res;
}

ZeroEnergyFit zero_energy_fit(const RadialField& pot) {
  const auto& grid = pot.grid;
  const std::size_t n = grid.n();
  const auto& g = grid.gaps();
  const auto& w = grid.weights();
  const auto& v = pot.values;

  const double start = grid.r_min() + 0.75 * (grid.r_max() - grid.r_min());
  const std::size_t first = grid.count_at_or_below(start) > 0 ? grid.count_at_or_below(start) - 1 : 0;
  if (n - first < 3) throw ValidationError("fit_window", "fit window holds fewer than 3 nodes");
  double vmax = 0.0;
  for (double x : v) vmax = std::max(vmax, std::abs(x));
  for (std::size_t i = first; i < n; ++i)
    if (std::abs(v[i]) > 1e-14 * vmax)
      throw ValidationError("support_in_fit_window", "potential support reaches the scattering-length fit window at r = " +
                                                         std::to_string(grid[i]));

  // Same three-point scheme as the bound-state operator at zero energy,
  // marched outward from u = 0 at the lower boundary.
  std::vector<double> u(n);
  double prev = 0.0;
  u[0] = g[0];
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double slope_in = (u[i] - prev) / g[i];
    u[i + 1] = u[i] + g[i + 1] * (slope_in + w[i] * v[i] * u[i]);
    prev = u[i];
    // keep deep wells from overflowing; only the ratio matters
    if (std::abs(u[i + 1]) > 1e150) {
      for (std::size_t j = 0; j <= i + 1; ++j) u[j] *= 1e-150;
      prev *= 1e-150;
    }
  }

  // least squares u = alpha r + beta over the window, centered for conditioning
  double sr = 0, su = 0;
  const double m = static_cast<double>(n - first);
  for (std::size_t i = first; i < n; ++i) sr += grid[i], su += u[i];
  const double rbar = sr / m, ubar = su / m;
  double srr = 0, sru = 0;
  for (std::size_t i = first; i < n; ++i) {
    srr += (grid[i] - rbar) * (grid[i] - rbar);
    sru += (grid[i] - rbar) * (u[i] - ubar);
  }
  double alpha = sru / srr;
  double beta = ubar - alpha * rbar;
  const double L = grid.r_max();
  const double scale = std::hypot(alpha, beta / L);
  if (!(scale > 0) || !std::isfinite(scale)) throw NumericalError("zero-energy solution degenerate");
  return {alpha / scale, beta / scale};
}

double scattering_length(const RadialField& pot) { return zero_energy_fit(pot).a(); }

namespace {

double slope_at(const PotentialSpec& shape, double g, const RadialGrid& grid) {
  PotentialSpec p = shape;
  p.coupling = g;
  return zero_energy_fit(realize_potential(p, grid)).slope;
}

}  // namespace

ResonanceResult tune_to_resonance(const PotentialSpec& shape, std::pair<double, double> bracket, const RadialGrid& grid) {
  auto [lo, hi] = bracket;
  if (!(lo >= 0) || !(hi > lo) || !std::isfinite(hi))
    throw ValidationError("bracket", "bracket must satisfy 0 <= g_lo < g_hi");
  // 1/a = -slope/intercept: a resonance is a zero of the slope, while a zero of
  // the intercept is a pole of 1/a. Scan for both before bisecting.
  constexpr int kScan = 33;
  std::vector<double> gs(kScan), slope(kScan), icpt(kScan);
  for (int i = 0; i < kScan; ++i) {
    gs[i] = lo + (hi - lo) * i / (kScan - 1);
    PotentialSpec p = shape;
    p.coupling = gs[i];
    const auto fit = zero_energy_fit(realize_potential(p, grid));
    slope[i] = fit.slope;
    icpt[i] = fit.intercept;
  }
  int crossings = 0, at = -1, poles = 0;
  for (int i = 0; i + 1 < kScan; ++i) {
    if ((slope[i] < 0) != (slope[i + 1] < 0)) ++crossings, at = i;
    if ((icpt[i] < 0) != (icpt[i + 1] < 0)) ++poles;
  }
  if (crossings == 0)
    throw ValidationError("no_sign_change", poles ? "1/a changes sign on the bracket only through a pole (a = 0), not a resonance"
                                                  : "1/a does not change sign on the bracket");
  if (crossings > 1)
    throw ValidationError("multiple_resonances", std::to_string(crossings) + " resonances inside the bracket");

  double a = gs[at], b = gs[at + 1];
  double fa = slope[at];
  int steps = 0;
  while (steps < 200) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    const double fm = slope_at(shape, mid, grid);
    ++steps;
    if (fm == 0.0) {
      a = b = mid;
      break;
    }
    if ((fm < 0) == (fa < 0)) a = mid, fa = fm;
    else b = mid;
  }
  // report the endpoint with the smaller |1/a|
  PotentialSpec p = shape;
  p.coupling = a;
  const auto fa_fit = zero_energy_fit(realize_potential(p, grid));
  p.coupling = b;
  const auto fb_fit = zero_energy_fit(realize_potential(p, grid));
  const bool use_a = std::abs(fa_fit.inverse_a()) <= std::abs(fb_fit.inverse_a());
  return {use_a ? a : b, use_a ? fa_fit.inverse_a() : fb_fit.inverse_a(), kScan, steps};
}

}  // namespace contactlab
