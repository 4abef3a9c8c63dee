#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>

#include "contactlab/error.hpp"
#include "contactlab/twobody/potential.hpp"
#include "doctest.h"

using namespace contactlab;

namespace {

std::string code_of(auto&& fn) {
  try {
    fn();
  } catch (const ValidationError& e) {
    return e.code();
  }
  return "";
}

PotentialSpec well(double g, ScalingClass c = ScalingClass::unscaled, double eps = 1.0, double R = 1.0) {
  return PotentialSpec{SquareWell{R}, g, c, eps};
}

double closed_form_a(double g) {
  const double k = std::sqrt(g);
  return 1.0 - std::tan(k) / k;
}

// ground state of the R = 1 well: k cot k = -kappa, k^2 + kappa^2 = g
double closed_form_ground(double g) {
  auto f = [g](double kappa) {
    const double k = std::sqrt(g - kappa * kappa);
    return k * std::cos(k) + kappa * std::sin(k);
  };
  std::uintmax_t it = 200;
  auto r = boost::math::tools::toms748_solve(f, 1e-9, std::sqrt(g) - 1e-12, boost::math::tools::eps_tolerance<double>(52), it);
  const double kappa = 0.5 * (r.first + r.second);
  return -kappa * kappa;
}

// The squared Rollnik integral of the unit ball has inner integral
// ((1-r^2)/2) ln((1+r)/(1-r)) + r and outer value 1/2 (mpmath, 30 digits).
constexpr double kRollnikUnitWell = 4.0 * std::numbers::pi * std::numbers::pi;

}  // namespace

TEST_CASE("realized amplitudes follow the scaling class") {
  auto grid = RadialGrid::make(2000, 1e-3, 2.0, SpacingLaw::uniform);
  auto strong = realize_potential(well(1, ScalingClass::strong, 0.5), grid);
  auto weak = realize_potential(well(1, ScalingClass::weak, 0.5), grid);
  CHECK(*std::min_element(strong.values.begin(), strong.values.end()) == doctest::Approx(-8.0));
  CHECK(*std::min_element(weak.values.begin(), weak.values.end()) == doctest::Approx(-4.0));
  for (std::size_t i = 0; i < grid.n(); ++i)
    if (grid[i] > 0.5 + grid.step()) CHECK(strong.values[i] == 0.0);
  for (auto c : {ScalingClass::strong, ScalingClass::weak}) {
    auto a = realize_potential(PotentialSpec{Gaussian{0.3}, 2.0, c, 1.0}, grid);
    auto b = realize_potential(PotentialSpec{Gaussian{0.3}, 2.0, ScalingClass::unscaled, 1.0}, grid);
    CHECK(a.values == b.values);
  }
}

TEST_CASE("under-resolved and invalid specs") {
  auto grid = RadialGrid::make(100, 0.01, 1.0, SpacingLaw::uniform);
  CHECK(code_of([&] { realize_potential(well(1, ScalingClass::strong, 0.05), grid); }) == "under_resolved");
  CHECK(code_of([&] { realize_potential(well(1, ScalingClass::strong, 0.0), grid); }) == "epsilon");
  CHECK(code_of([&] { realize_potential(well(-1), grid); }) == "coupling");
  CHECK(code_of([&] { realize_potential(PotentialSpec{UserTable{{0, 1}, {1}}, 1, ScalingClass::unscaled, 1}, grid); }) == "table_shape");
}

TEST_CASE("extension norms") {
  auto n = extension_norms(well(1));
  CHECK(n.l1 == doctest::Approx(4.0 * std::numbers::pi / 3.0).epsilon(1e-10));
  CHECK(n.rollnik == doctest::Approx(kRollnikUnitWell).epsilon(1e-8));
  // R^4 g^2 scaling of the Rollnik integral
  auto n2 = extension_norms(well(3, ScalingClass::unscaled, 1.0, 0.5));
  CHECK(n2.rollnik == doctest::Approx(9 * 0.0625 * kRollnikUnitWell).epsilon(1e-8));

  const double l1 = extension_norms(well(1, ScalingClass::strong, 1.0)).l1;
  for (double eps : {0.5, 0.1}) {
    CHECK(std::abs(extension_norms(well(1, ScalingClass::strong, eps)).l1 - l1) < 1e-10 * l1);
    // weak class keeps the Rollnik norm
    CHECK(extension_norms(well(1, ScalingClass::weak, eps)).rollnik == doctest::Approx(kRollnikUnitWell).epsilon(1e-8));
  }
  auto z = extension_norms(well(0));
  CHECK(z.l1 == 0.0);
  CHECK(z.rollnik == 0.0);

  auto gn = extension_norms(PotentialSpec{Gaussian{0.7}, 2.0, ScalingClass::unscaled, 1.0});
  CHECK(gn.l1 == doctest::Approx(2.0 * std::pow(std::numbers::pi, 1.5) * std::pow(0.7, 3)).epsilon(1e-9));

  PotentialSpec tab{UserTable{{0, 0.5, 1.0}, {1, 1, 0}}, 1, ScalingClass::unscaled, 1};
  auto tn = extension_norms(tab);
  // int_0^1 r^2 shape = 1/24 + int_{1/2}^1 r^2 (2 - 2r) = 1/24 + 11/96
  CHECK(tn.l1 == doctest::Approx(4 * std::numbers::pi * (1.0 / 24 + 11.0 / 96)).epsilon(1e-9));
  PotentialSpec bad{UserTable{{0, 1.0}, {1, 1}}, 1, ScalingClass::unscaled, 1};
  CHECK(code_of([&] { extension_norms(bad); }) == "nonintegrable_table");
}

TEST_CASE("bound states of the square well") {
  auto grid = RadialGrid::make(6000, 1e-3, 6.0, SpacingLaw::uniform);
  EigenRequest req;
  req.k = 5;
  req.tol = 1e-8;
  CHECK(bound_states_radial(realize_potential(well(2.0), grid), req).negative_count == 0);
  CHECK(bound_states_radial(realize_potential(well(0.0), grid), req).negative_count == 0);
  auto res = bound_states_radial(realize_potential(well(12.0), grid), req);
  REQUIRE(res.negative_count == 1);
  REQUIRE(res.eigenvalues.size() == 1);
  CHECK(std::abs(res.eigenvalues[0] - closed_form_ground(12.0)) < 1e-4);
  CHECK(res.residuals[0] <= req.tol);
}

TEST_CASE("negative count is monotone in the coupling") {
  auto grid = RadialGrid::make(1500, 4e-3, 6.0, SpacingLaw::uniform);
  EigenRequest req;
  req.k = 10;
  req.tol = 1e-7;
  std::size_t prev = 0;
  for (int i = 0; i < 20; ++i) {
    const double g = 0.5 + 4.0 * i;
    const auto c = bound_states_radial(realize_potential(well(g), grid), req).negative_count;
    CHECK(c >= prev);
    prev = c;
  }
  CHECK(prev >= 3);
}

TEST_CASE("weak scaling covariance on matched grids") {
  const PotentialSpec base{Gaussian{1.0}, 8.0, ScalingClass::unscaled, 1.0};
  auto grid = RadialGrid::make(3000, 5e-3, 10.0, SpacingLaw::uniform);
  EigenRequest req;
  req.k = 4;
  req.tol = 1e-9;
  auto ref = bound_states_radial(realize_potential(base, grid), req);
  REQUIRE(ref.negative_count >= 1);
  for (double eps : {0.5, 0.25}) {
    PotentialSpec s = base;
    s.scaling = ScalingClass::weak;
    s.epsilon = eps;
    auto res = bound_states_radial(realize_potential(s, grid.dilated(eps)), req);
    REQUIRE(res.eigenvalues.size() == ref.eigenvalues.size());
    for (std::size_t i = 0; i < ref.eigenvalues.size(); ++i)
      CHECK(std::abs(res.eigenvalues[i] * eps * eps / ref.eigenvalues[i] - 1.0) < 1e-6);
  }
}

TEST_CASE("scattering length against the closed form") {
  auto grid = RadialGrid::make(40000, 1e-4, 4.0, SpacingLaw::uniform);
  for (double g : {0.3, 1.0, 2.0, 5.0, 12.0, 30.0}) {
    const double a = scattering_length(realize_potential(well(g), grid));
    CHECK(std::abs(a / closed_form_a(g) - 1.0) < 1e-6);
  }
  CHECK(std::abs(scattering_length(realize_potential(well(0.0), grid))) < 1e-12);
  CHECK(std::abs(scattering_length(realize_potential(well(std::numbers::pi * std::numbers::pi / 4 - 1e-4), grid))) > 1e3);
  auto small = RadialGrid::make(100, 0.03, 3.0, SpacingLaw::uniform);
  CHECK(code_of([&] { scattering_length(realize_potential(well(1, ScalingClass::unscaled, 1, 2.5), small)); }) ==
        "support_in_fit_window");
}

TEST_CASE("resonance tuning") {
  auto grid = RadialGrid::make(80000, 5e-5, 4.0, SpacingLaw::uniform);
  auto res = tune_to_resonance(well(0), {1.0, 4.0}, grid);
  CHECK(std::abs(res.coupling - std::numbers::pi * std::numbers::pi / 4) < 1e-8);
  CHECK(std::abs(res.inverse_a) <= 1e-8);

  auto gauss = tune_to_resonance(PotentialSpec{Gaussian{1.0}, 0, ScalingClass::unscaled, 1}, {2.0, 4.0},
                                 RadialGrid::make(40000, 5e-4, 20.0, SpacingLaw::uniform));
  PotentialSpec at{Gaussian{1.0}, gauss.coupling, ScalingClass::unscaled, 1};
  CHECK(std::abs(scattering_length(realize_potential(at, RadialGrid::make(40000, 5e-4, 20.0, SpacingLaw::uniform)))) > 1e6);

  CHECK(code_of([&] { tune_to_resonance(well(0), {0.1, 0.2}, grid); }) == "no_sign_change");
  CHECK(code_of([&] { tune_to_resonance(well(0), {1.0, 30.0}, grid); }) == "multiple_resonances");
}

TEST_CASE("bound state appears as the coupling crosses the tuned resonance") {
  auto grid = RadialGrid::make(4000, 1e-3, 4.0, SpacingLaw::uniform);
  const auto g = tune_to_resonance(well(0), {1.0, 4.0}, grid).coupling;
  EigenRequest req;
  req.k = 2;
  req.tol = 1e-9;
  CHECK(bound_states_radial(realize_potential(well(g - 1e-6), grid), req, OuterBoundary::neumann).negative_count == 0);
  CHECK(bound_states_radial(realize_potential(well(g + 1e-6), grid), req, OuterBoundary::neumann).negative_count == 1);
}
