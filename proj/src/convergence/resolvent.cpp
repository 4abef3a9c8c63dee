#include "contactlab/convergence/resolvent.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>

#include "contactlab/error.hpp"
#include "contactlab/numerics/eigen.hpp"
#include "contactlab/numerics/radial_operator.hpp"
#include "contactlab/parallel.hpp"

namespace contactlab {

BSKernel bs_kernel(const TridiagonalOperator& h_base, const RadialField& u, double z, std::string potential_meta) {
  if (!(z > 0.0) || !std::isfinite(z)) throw ValidationError("bs_z", "z must be positive and finite");
  if (u.values.size() != h_base.dim()) throw ValidationError("grid_mismatch", "u does not live on the operator grid");
  BSKernel k;
  k.z = z;
  k.potential_meta = std::move(potential_meta);
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    if (u.values[i] < 0.0) throw ValidationError("bs_negative_u", "u must be nonnegative (pass u = -V)");
    if (u.values[i] > 0.0) k.support.push_back(i);
  }
  const std::size_t m = k.support.size();
  k.matrix = Eigen::MatrixXd::Zero(m, m);
  if (m == 0) return k;
  const auto fac = h_base.factorize(-z);
  std::vector<double> col(h_base.dim());
  for (std::size_t j = 0; j < m; ++j) {
    std::fill(col.begin(), col.end(), 0.0);
    col[k.support[j]] = std::sqrt(u.values[k.support[j]]);
    fac->solve(col);
    for (std::size_t i = 0; i < m; ++i) k.matrix(i, j) = std::sqrt(u.values[k.support[i]]) * col[k.support[i]];
  }
  k.matrix = 0.5 * (k.matrix + k.matrix.transpose()).eval();
  return k;
}

double max_eigenvalue(const BSKernel& k) {
  if (k.matrix.rows() == 0) return 0.0;
  return dense_eigenvalues(k.matrix).back();
}

std::size_t count_above_one(const BSKernel& k) {
  if (k.matrix.rows() == 0) return 0;
  const auto ev = dense_eigenvalues(k.matrix);
  return static_cast<std::size_t>(std::count_if(ev.begin(), ev.end(), [](double v) { return v > 1.0; }));
}

double bs_crossing(const TridiagonalOperator& h_base, const RadialField& u) {
  const double umax = *std::max_element(u.values.begin(), u.values.end());
  if (!(umax > 0.0)) throw NumericalError("u vanishes; no bound state");
  auto f = [&](double z) { return max_eigenvalue(bs_kernel(h_base, u, z)) - 1.0; };
  const double lo = 1e-10 * umax, hi = 1.01 * umax;
  const double flo = f(lo);
  if (!(flo > 0.0)) throw NumericalError("no bound state below -z for any z > 0");
  std::uintmax_t it = 200;
  const auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, f(hi), boost::math::tools::eps_tolerance<double>(50), it);
  return 0.5 * (r.first + r.second);
}

void CompositePotential::validate() const {
  if (v1.scaling != ScalingClass::strong) throw ValidationError("composite_class", "v1 must be strong class");
  if (v2.scaling != ScalingClass::weak) throw ValidationError("composite_class", "v2 must be weak class");
  if (v3.scaling != ScalingClass::unscaled) throw ValidationError("composite_class", "v3 must be unscaled");
  for (const auto* p : {&v1, &v2, &v3}) {
    p->validate();
    if (p->coupling < 0.0) throw ValidationError("coupling", "composite couplings must be nonnegative (attractive)");
  }
}

std::vector<PotentialSpec> CompositePotential::at(double eps) const {
  validate();
  if (!(eps > 0.0) || !std::isfinite(eps)) throw ValidationError("epsilon", "epsilon must be positive");
  PotentialSpec a = v1, b = v2;
  a.epsilon = eps;
  b.epsilon = eps;
  return {a, b, v3};
}

RadialField CompositePotential::realize(double eps, const RadialGrid& grid) const {
  std::vector<double> v(grid.n(), 0.0);
  for (const auto& p : at(eps)) {
    const auto f = realize_potential(p, grid);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += f.values[i];
  }
  return RadialField(grid, std::move(v));
}

Eigen::MatrixXd kk_correction(const RadialField& v, double z) {
  if (!(z > 0.0) || !std::isfinite(z)) throw ValidationError("kk_z", "z must be positive and finite");
  const std::size_t n = v.grid.n();
  std::vector<std::size_t> sup;
  std::vector<double> b;
  for (std::size_t i = 0; i < n; ++i) {
    if (v.values[i] > 0.0) throw ValidationError("kk_repulsive", "B = sqrt(-V) needs V <= 0");
    if (v.values[i] < 0.0) {
      sup.push_back(i);
      b.push_back(std::sqrt(-v.values[i]));
    }
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  const std::size_t m = sup.size();
  if (m == 0) return out;
  const auto h0 = radial_hamiltonian(v.grid, {});
  const auto fac = h0.factorize(-z);
  // x = R0 B restricted to support columns
  Eigen::MatrixXd x(n, m);
  std::vector<double> col(n);
  for (std::size_t j = 0; j < m; ++j) {
    std::fill(col.begin(), col.end(), 0.0);
    col[sup[j]] = b[j];
    fac->solve(col);
    for (std::size_t i = 0; i < n; ++i) x(i, j) = col[i];
  }
  Eigen::MatrixXd q(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) q(i, j) = b[i] * x(sup[i], j);
  q = 0.5 * (q + q.transpose()).eval();
  const double norm = dense_eigenvalues(q).back();
  if (!(norm < 1.0))
    throw InvertibilityError("||Q(z)|| = " + std::to_string(norm) + " >= 1: z is at or below a bound state", norm);
  const Eigen::MatrixXd iq = Eigen::MatrixXd::Identity(m, m) - q;
  const Eigen::MatrixXd y = iq.llt().solve(x.transpose());
  out.noalias() = x * y;
  return 0.5 * (out + out.transpose());
}

Eigen::MatrixXd kk_correction(const CompositePotential& c, double eps, double z, const RadialGrid& grid) {
  return kk_correction(c.realize(eps, grid), z);
}

Eigen::MatrixXd resolvent_difference_dense(const RadialField& v, double z) {
  const auto n = static_cast<Eigen::Index>(v.grid.n());
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd h = radial_hamiltonian(v.grid, v.values).assemble() + z * id;
  const Eigen::MatrixXd h0 = radial_hamiltonian(v.grid, {}).assemble() + z * id;
  return h.ldlt().solve(id) - h0.ldlt().solve(id);
}

double cross_term_norm(const CompositePotential& c, double eps) {
  if (!(eps > 0.0) || !(eps <= 1.0)) throw ValidationError("epsilon", "epsilon must lie in (0, 1]");
  const auto parts = c.at(eps);
  const auto& a = parts[0];
  if (a.coupling == 0.0 || (parts[1].coupling == 0.0 && parts[2].coupling == 0.0)) return 0.0;
  const double end = a.integration_end();
  std::vector<double> cuts{0.0, end};
  for (const auto& p : parts)
    for (double x : p.breakpoints())
      if (x > 0.0 && x < end) cuts.push_back(x);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  auto f = [&](double r) {
    const double u = std::abs(parts[1].value(r) + parts[2].value(r));
    return r * r * std::sqrt(std::abs(a.value(r))) * std::sqrt(u);
  };
  double total = 0.0;
  for (std::size_t j = 0; j + 1 < cuts.size(); ++j)
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, cuts[j], cuts[j + 1], 15, 1e-13);
  return 4.0 * std::numbers::pi * total;
}

namespace {

double ground_energy(const RadialField& v) {
  const auto h = radial_hamiltonian(v.grid, v.values);
  EigenRequest req;
  req.k = 1;
  return eigs_smallest(h, req).eigenvalues.front();
}

}  // namespace

EpsilonSweepReport epsilon_sweep(const CompositePotential& c, const std::vector<double>& epsilons,
                                 const SweepOptions& opt) {
  c.validate();
  if (epsilons.empty()) throw ValidationError("sweep_empty", "epsilon list is empty");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0) || !std::isfinite(epsilons[i])) throw ValidationError("epsilon", "epsilons must be positive");
    if (i > 0 && !(epsilons[i] < epsilons[i - 1])) throw ValidationError("sweep_order", "epsilons must strictly decrease");
  }
  EpsilonSweepReport rep;
  rep.epsilons = epsilons;
  rep.per_epsilon.resize(epsilons.size());
  // realize everything first so resolution errors surface before any solve
  std::vector<RadialField> fields;
  for (double e : epsilons) fields.push_back(c.realize(e, opt.grid));
  const auto h0 = radial_hamiltonian(opt.grid, {});
  parallel_for(epsilons.size(), [&](std::size_t i) {
    EpsilonRecord& r = rep.per_epsilon[i];
    const RadialField& v = fields[i];
    r.epsilon = epsilons[i];
    const auto h = radial_hamiltonian(v.grid, v.values);
    EigenRequest req;
    req.k = 1;
    r.ground_eigenvalue = eigs_smallest(h, req).eigenvalues.front();
    r.negative_count = count_below(h, 0.0);
    if (opt.extension_norms) r.norms = extension_norms(c.at(epsilons[i]));
    if (opt.bs_diagnostic) {
      std::vector<double> u(v.values.size());
      for (std::size_t j = 0; j < u.size(); ++j) u[j] = -v.values[j];
      r.bs_max_eigenvalue = max_eigenvalue(bs_kernel(h0, RadialField(v.grid, std::move(u)), opt.bs_z));
    }
    if (epsilons[i] <= 1.0) r.cross_term_norm = cross_term_norm(c, epsilons[i]);
  });
  rep.monotone_flag = true;
  for (std::size_t i = 1; i < epsilons.size(); ++i) {
    const double a = rep.per_epsilon[i - 1].ground_eigenvalue, b = rep.per_epsilon[i].ground_eigenvalue;
    rep.cauchy_gaps.push_back(std::abs(a - b));
    if (b > a + opt.monotone_tol) rep.monotone_flag = false;
  }
  rep.gaps_decreasing = true;
  for (std::size_t i = 1; i < rep.cauchy_gaps.size(); ++i)
    if (!(rep.cauchy_gaps[i] < rep.cauchy_gaps[i - 1])) rep.gaps_decreasing = false;
  return rep;
}

std::vector<double> v3_shift_sequence(const CompositePotential& c, const std::vector<double>& epsilons,
                                      const RadialGrid& grid) {
  CompositePotential bare = c;
  bare.v3.coupling = 0.0;
  std::vector<double> out(epsilons.size());
  parallel_for(epsilons.size(), [&](std::size_t i) {
    out[i] = ground_energy(c.realize(epsilons[i], grid)) - ground_energy(bare.realize(epsilons[i], grid));
  });
  return out;
}

}  // namespace contactlab
