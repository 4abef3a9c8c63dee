#include <fftw3.h>

#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numbers>
#include <vector>

#include "../numerics/fftw_lock.hpp"
#include "contactlab/contact/model.hpp"
#include "contactlab/error.hpp"
#include "contactlab/parallel.hpp"

namespace contactlab {

namespace {

using std::numbers::pi;

// S diag(k) S with S the orthonormal DST-I, built column-wise from RODFT00.
Eigen::MatrixXd sine_multiplier(const RadialGrid& grid) {
  const std::size_t n = grid.n();
  const double len = grid.upper_boundary() - grid.lower_boundary();
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    const int ni = static_cast<int>(n);
    const fftw_r2r_kind kind = FFTW_RODFT00;
    plan = fftw_plan_many_r2r(1, &ni, ni, a.data(), nullptr, 1, ni, a.data(), nullptr, 1, ni, &kind,
                              FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  if (!plan) throw NumericalError("FFTW planning failed");
  fftw_execute_r2r(plan, a.data(), a.data());
  const double scale = 1.0 / (2.0 * static_cast<double>(n + 1));
  for (std::size_t m = 0; m < n; ++m) a.row(m) *= pi * static_cast<double>(m + 1) / len * scale;
  fftw_execute_r2r(plan, a.data(), a.data());
  {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  return 0.5 * (a + a.transpose());
}

struct Rule {
  std::vector<double> x, w;  // on [0, 1]
};

template <unsigned N>
Rule gauss_rule() {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& ab = G::abscissa();
  const auto& wt = G::weights();
  Rule r;
  for (std::size_t i = 0; i < ab.size(); ++i) {
    if (ab[i] == 0.0) {
      r.x.push_back(0.5);
      r.w.push_back(0.5 * wt[i]);
      continue;
    }
    r.x.push_back(0.5 * (1.0 - ab[i]));
    r.w.push_back(0.5 * wt[i]);
    r.x.push_back(0.5 * (1.0 + ab[i]));
    r.w.push_back(0.5 * wt[i]);
  }
  return r;
}

const std::array<Rule, 4>& rules() {
  static const std::array<Rule, 4> r{gauss_rule<4>(), gauss_rule<6>(), gauss_rule<10>(), gauss_rule<16>()};
  return r;
}

// Quadrature points of one element with the two local hat values.
struct ElementRule {
  std::vector<double> x, w, left, right;
};

// P1 Galerkin matrix of the half-line form
//   (1/4pi) int int (u(x)-u(y))^2 [1/(x-y)^2 + 1/(x+y)^2] dx dy
// over hats on [lower, upper], reduced by the lumped mass matrix.
Eigen::MatrixXd galerkin_half_line(const RadialGrid& grid) {
  const std::size_t n = grid.n();
  std::vector<double> p(n + 2);
  p[0] = grid.lower_boundary();
  for (std::size_t i = 0; i < n; ++i) p[i + 1] = grid[i];
  p[n + 1] = grid.upper_boundary();
  const std::size_t ne = n + 1;  // element e spans [p_e, p_{e+1}], nodes e-1 (left) and e (right)
  std::vector<double> len(ne);
  for (std::size_t e = 0; e < ne; ++e) len[e] = p[e + 1] - p[e];

  const auto& rs = rules();
  std::vector<std::array<ElementRule, 4>> er(ne);
  for (std::size_t e = 0; e < ne; ++e)
    for (std::size_t q = 0; q < 4; ++q) {
      auto& r = er[e][q];
      for (std::size_t k = 0; k < rs[q].x.size(); ++k) {
        const double t = rs[q].x[k];
        r.x.push_back(p[e] + t * len[e]);
        r.w.push_back(rs[q].w[k] * len[e]);
        r.left.push_back(1.0 - t);
        r.right.push_back(t);
      }
    }
  auto node_of = [&](std::size_t e, int side) -> long {
    const long idx = static_cast<long>(e) - 1 + side;
    return (idx >= 0 && idx < static_cast<long>(n)) ? idx : -1;
  };

  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  auto add = [&](long i, long j, double v) {
    if (i >= 0 && j >= 0) k(i, j) += v;
  };

  // Element-local parts: same element, adjacent pairs, and the x-only
  // integrals against the remainder of the half-line.
  for (std::size_t e = 0; e < ne; ++e) {
    const long a = node_of(e, 0), b = node_of(e, 1);
    const double g = 1.0;  // int int over E x E of (u(x)-u(y))^2/(x-y)^2 = (u_b - u_a)^2
    add(a, a, g);
    add(b, b, g);
    add(a, b, -g);
    add(b, a, -g);

    const double c = e >= 1 ? p[e - 1] : p[0];
    const double d = e + 1 < ne ? p[e + 2] : p[ne];
    const auto& r = er[e][3];
    double m00 = 0, m01 = 0, m11 = 0;
    for (std::size_t q = 0; q < r.x.size(); ++q) {
      const double x = r.x[q];
      double wgt = 1.0 / (d - x) + 1.0 / x;  // 1/(x+y)^2 part integrates to 1/x over the half-line
      wgt += (c > 0.0) ? 1.0 / (x - c) - 1.0 / x : 0.0;
      const double f = 2.0 * r.w[q] * wgt;
      m00 += f * r.left[q] * r.left[q];
      m01 += f * r.left[q] * r.right[q];
      m11 += f * r.right[q] * r.right[q];
    }
    add(a, a, m00);
    add(b, b, m11);
    add(a, b, m01);
    add(b, a, m01);

    if (e + 1 < ne) {
      const double al = len[e], be = len[e + 1];
      const double iss = al * be - be * be * std::log1p(al / be);
      const double itt = al * be - al * al * std::log1p(be / al);
      const double ist = 0.5 * (al * be - iss - itt);
      const long ids[3] = {node_of(e, 0), node_of(e, 1), node_of(e + 1, 1)};
      const double ge[3] = {-1.0 / al, 1.0 / al, 0.0};
      const double gf[3] = {0.0, -1.0 / be, 1.0 / be};
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          add(ids[i], ids[j], 2.0 * (iss * ge[i] * ge[j] + ist * (ge[i] * gf[j] + gf[i] * ge[j]) + itt * gf[i] * gf[j]));
    }
  }

  // Pair parts: -2 int int phi_i(x) phi_j(y)/(x-y)^2 for non-adjacent
  // elements and +2 int int phi_i(x) phi_j(y)/(x+y)^2 for all pairs.
  auto pick = [](double rho) -> std::size_t { return rho >= 1.0 ? 3 : rho >= 0.25 ? 2 : rho >= 0.05 ? 1 : 0; };
  // Each element pair (e, f), f >= e, adds its block to rows {e-1, e} of m;
  // the full pair matrix is m + m^T (diagonal blocks carry half weight).
  // Even and odd e run in separate phases so no two tasks share a row.
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  auto element_row = [&](std::size_t e) {
    for (std::size_t f = e; f < ne; ++f) {
      const double span = std::max(len[e], len[f]);
      const bool far = f >= e + 2;
      std::size_t q = far ? pick(span / (p[f] - p[e + 1])) : 3;
      const double sum_dist = p[e] + p[f];
      q = std::max(q, sum_dist > 0.0 ? pick(span / sum_dist) : std::size_t{3});
      const auto& rx = er[e][q];
      const auto& ry = er[f][q];
      double g[2][2] = {{0, 0}, {0, 0}};
      for (std::size_t s = 0; s < rx.x.size(); ++s) {
        const double x = rx.x[s];
        const double lx[2] = {rx.left[s] * rx.w[s], rx.right[s] * rx.w[s]};
        for (std::size_t t = 0; t < ry.x.size(); ++t) {
          const double y = ry.x[t];
          const double sp = x + y;
          double ker = 1.0 / (sp * sp);
          if (far) {
            const double df = x - y;
            ker -= 1.0 / (df * df);
          }
          ker *= 2.0 * ry.w[t];
          const double ly[2] = {ry.left[t] * ker, ry.right[t] * ker};
          g[0][0] += lx[0] * ly[0];
          g[0][1] += lx[0] * ly[1];
          g[1][0] += lx[1] * ly[0];
          g[1][1] += lx[1] * ly[1];
        }
      }
      const double half = f == e ? 0.5 : 1.0;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          const long a = node_of(e, i), b = node_of(f, j);
          if (a >= 0 && b >= 0) m(a, b) += half * g[i][j];
        }
    }
  };
  for (std::size_t phase = 0; phase < 2; ++phase)
    parallel_for((ne + 1 - phase) / 2, [&](std::size_t k2) { element_row(2 * k2 + phase); });
  const Eigen::MatrixXd pairs = m + m.transpose();
  k += pairs;
  k *= 1.0 / (2.0 * pi);

  const auto& w = grid.weights();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) k(i, j) /= std::sqrt(w[i] * w[j]);
  return 0.5 * (k + k.transpose());
}

}  // namespace

Eigen::MatrixXd half_line_sqrt_laplacian(const RadialGrid& grid) {
  if (grid.law() == SpacingLaw::uniform &&
      std::abs(grid.lower_boundary() - (grid.r_min() - grid.step())) > 1e-9 * grid.step())
    throw ValidationError("grid_uniform_origin", "uniform grid needs r_min >= step so the sine basis fits in r >= 0");
  return grid.law() == SpacingLaw::uniform ? sine_multiplier(grid) : galerkin_half_line(grid);
}

}  // namespace contactlab
