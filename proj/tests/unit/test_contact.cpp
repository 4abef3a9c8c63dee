#include <cmath>
#include <numbers>
#include <random>

#include "contactlab/contact/model.hpp"
#include "contactlab/error.hpp"
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

RadialGrid uniform_level(std::size_t n) { return RadialGrid::make(n, 1.0 / n, 1.0, SpacingLaw::uniform); }

std::size_t dense_negatives(const ContactModelOperator& op) {
  std::size_t k = 0;
  for (double v : dense_eigenvalues(op.matrix()))
    if (v < 0.0) ++k;
  return k;
}

// <u, sqrt(-d^2) u> for u = r exp(-r^2/2) on the half-line is exactly 1/2.
double gaussian_form(const RadialGrid& g) {
  const auto a = half_line_sqrt_laplacian(g);
  Eigen::VectorXd v(g.n());
  for (std::size_t i = 0; i < g.n(); ++i) v(i) = g[i] * std::exp(-0.5 * g[i] * g[i]) * std::sqrt(g.weights()[i]);
  return v.dot(a * v);
}

SpectrumResult synthetic(auto&& f, int n) {
  SpectrumResult s;
  for (int i = 1; i <= n; ++i) s.eigenvalues.push_back(f(i));
  std::sort(s.eigenvalues.begin(), s.eigenvalues.end());
  return s;
}

}  // namespace

TEST_CASE("kinetic forms reproduce the half-line quadratic form") {
  CHECK(gaussian_form(RadialGrid::make(3000, 24.0 / 3000, 24.0, SpacingLaw::uniform)) == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(gaussian_form(RadialGrid::make(600, 1e-5, 12.0, SpacingLaw::logarithmic)) ==
        doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("kinetic part is positive and symmetric") {
  for (auto g : {uniform_level(200), RadialGrid::make(200, 1e-4, 10.0, SpacingLaw::logarithmic)}) {
    const auto a = half_line_sqrt_laplacian(g);
    CHECK((a - a.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(dense_eigenvalues(a).front() > 0.0);
  }
}

TEST_CASE("model operator examples") {
  const auto pure = ContactModelOperator::build(ContactKind::strong, 0.0, uniform_level(300));
  CHECK(dense_eigenvalues(pure.matrix()).front() >= 0.0);
  CHECK(dense_negatives(ContactModelOperator::build(ContactKind::strong, 0.1, uniform_level(1000))) == 0);
  const auto weak = ContactModelOperator::build(ContactKind::weak, 1.0, RadialGrid::make(300, 1e-3, 30.0, SpacingLaw::logarithmic));
  CHECK(symmetry_defect(weak, 7) < 1e-10);
  CHECK(code_of([] { ContactModelOperator::build(ContactKind::strong, -1.0, uniform_level(50)); }) == "coupling");
  CHECK(code_of([] { ContactModelOperator::build(ContactKind::strong, 1.0, RadialGrid::make(50, 1e-3, 1.0, SpacingLaw::uniform)); }) ==
        "grid_uniform_origin");
}

TEST_CASE("efimov sequence") {
  SUBCASE("supercritical tower on a fine cutoff") {
    const auto g = RadialGrid::make(2000, 1e-4, 10.0, SpacingLaw::logarithmic);
    const auto op = ContactModelOperator::build(ContactKind::strong, 1.0, g);
    EigenRequest req;
    req.k = 50;
    const auto s = efimov_sequence(op, req);
    const std::size_t oracle = dense_negatives(op);
    CHECK(oracle >= 3);
    CHECK(s.negative_count == oracle);
    CHECK(s.eigenvalues.size() == std::min<std::size_t>(oracle, 50));
    CHECK(std::is_sorted(s.eigenvalues.begin(), s.eigenvalues.end()));
    for (double r : s.residuals) CHECK(r <= req.tol);
  }
  SUBCASE("C = 0 is empty and flagged") {
    const auto s = efimov_sequence(ContactModelOperator::build(ContactKind::strong, 0.0, uniform_level(100)), EigenRequest{});
    CHECK(s.eigenvalues.empty());
    CHECK(s.truncated);
  }
  SUBCASE("iterative matches dense") {
    for (auto kind : {ContactKind::strong, ContactKind::weak}) {
      const auto g = RadialGrid::make(200, 1e-3, 20.0, SpacingLaw::logarithmic);
      const auto op = ContactModelOperator::build(kind, 1.5, g);
      EigenRequest req;
      req.k = 200;
      const auto s = efimov_sequence(op, req);
      const auto ev = dense_eigenvalues(op.matrix());
      REQUIRE(!s.eigenvalues.empty());
      for (std::size_t i = 0; i < s.eigenvalues.size(); ++i) CHECK(std::abs(s.eigenvalues[i] - ev[i]) <= 1e-9 * std::max(1.0, std::abs(ev[i])));
    }
  }
}

TEST_CASE("scale covariance") {
  for (auto g : {uniform_level(400), RadialGrid::make(400, 1e-4, 10.0, SpacingLaw::logarithmic)}) {
    const auto base = dense_eigenvalues(ContactModelOperator::build(ContactKind::strong, 1.2, g).matrix());
    for (double s : {2.0, 4.0}) {
      const auto scaled = dense_eigenvalues(ContactModelOperator::build(ContactKind::strong, 1.2, g.dilated(s)).matrix());
      for (std::size_t i = 0; i < 10; ++i) CHECK(scaled[i] * s == doctest::Approx(base[i]).epsilon(1e-10));
    }
  }
}

TEST_CASE("eigenvalues are nonincreasing in C") {
  const auto op = ContactModelOperator::build(ContactKind::strong, 0.0, uniform_level(200));
  std::vector<double> prev;
  for (int i = 0; i < 10; ++i) {
    const auto ev = dense_eigenvalues(op.with_coupling(0.3 * i).matrix());
    if (!prev.empty())
      for (std::size_t j = 0; j < 5; ++j) CHECK(ev[j] <= prev[j]);
    prev = ev;
  }
}

TEST_CASE("B kernel") {
  const auto g = uniform_level(120);
  const std::size_t n = g.n();
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd v(n, 3);
  for (std::size_t i = 0; i < n; ++i)
    for (int j = 0; j < 3; ++j) v(i, j) = nd(rng);
  const Eigen::MatrixXd b = v * v.transpose();
  const auto plain = dense_eigenvalues(ContactModelOperator::build(ContactKind::strong, 2.0, g).matrix());
  const auto with_b = dense_eigenvalues(ContactModelOperator::build(ContactKind::strong, 2.0, g, b).matrix());
  for (std::size_t i = 0; i < n; ++i) CHECK(with_b[i] >= plain[i] - 1e-12 * std::max(1.0, std::abs(plain[i])));

  Eigen::MatrixXd asym = b;
  asym(0, 1) += 1.0;
  CHECK(code_of([&] { ContactModelOperator::build(ContactKind::strong, 1.0, g, asym); }) == "b_kernel_asymmetric");
  Eigen::MatrixXd indef = -b;
  CHECK(code_of([&] { ContactModelOperator::build(ContactKind::strong, 1.0, g, indef); }) == "b_kernel_not_positive");
  CHECK(code_of([&] { ContactModelOperator::build(ContactKind::strong, 1.0, g, Eigen::MatrixXd::Zero(3, 3)); }) ==
        "b_kernel_shape");
}

TEST_CASE("asymptotic fits recover synthetic towers") {
  const auto lg = fit_asymptotics(synthetic([](int n) { return -0.5 * std::log(n); }, 20), FitModel::log_n);
  CHECK(lg.params[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(lg.rms_residual < 1e-12);
  const auto sq = fit_asymptotics(synthetic([](int n) { return -2.0 / std::sqrt(n); }, 20), FitModel::sqrt_n);
  CHECK(sq.params[0] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(sq.rms_residual < 1e-12);
  const auto ge = fit_asymptotics(synthetic([](int n) { return -3.0 * std::exp(-0.7 * n); }, 15), FitModel::geometric);
  CHECK(ge.params[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(ge.params[1] == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(ge.rms_residual < 1e-12);
  const auto all = fit_all(synthetic([](int n) { return -2.0 / std::sqrt(n); }, 20));
  CHECK(all.front().model == FitModel::sqrt_n);
  CHECK(code_of([] { fit_asymptotics(synthetic([](int n) { return -1.0 / n; }, 3), FitModel::sqrt_n); }) == "fit_points");
}

TEST_CASE("log-model extrapolation is exact on model data") {
  std::vector<double> x, y;
  for (int l = 0; l < 5; ++l) {
    x.push_back(std::log(100.0 * (1 << l)));
    y.push_back(0.6 + 2.0 / ((x.back() + 1.5) * (x.back() + 1.5)));
  }
  const auto f = extrapolate_log_model(x, y);
  CHECK(f.limit == doctest::Approx(0.6).epsilon(1e-8));
  CHECK(f.b == doctest::Approx(1.5).epsilon(1e-6));
}

TEST_CASE("critical constants") {
  std::vector<RadialGrid> fam;
  for (std::size_t n : {25, 50, 100, 200}) fam.push_back(uniform_level(n));
  CriticalOptions opt;
  opt.probe_tol = 1e-10;
  const auto cc = critical_constants(ContactKind::strong, fam, opt);
  // per-level threshold is the smallest generalized eigenvalue of K u = C r^{-1} u
  for (std::size_t l = 0; l < fam.size(); ++l) {
    const auto k = half_line_sqrt_laplacian(fam[l]);
    Eigen::VectorXd sr(fam[l].n());
    for (std::size_t i = 0; i < fam[l].n(); ++i) sr(i) = std::sqrt(fam[l][i]);
    const double oracle = dense_eigenvalues(sr.asDiagonal() * k * sr.asDiagonal()).front();
    CHECK(cc.c1_levels[l] == doctest::Approx(oracle).epsilon(1e-9));
  }
  CHECK(std::is_sorted(cc.c1_levels.rbegin(), cc.c1_levels.rend()));
  CHECK(cc.c1 > 0.0);
  CHECK(cc.c1 <= cc.c2);
  CHECK(cc.window_limits.size() == 3);
  CHECK(cc.refinement_trace.size() == 4);

  CHECK(code_of([&] { critical_constants(ContactKind::strong, {fam[0]}); }) == "refinement_levels");
  std::vector<RadialGrid> bad{uniform_level(25), uniform_level(50), uniform_level(75), uniform_level(100)};
  CHECK(code_of([&] { critical_constants(ContactKind::strong, bad); }) == "refinement_ratio");
}
