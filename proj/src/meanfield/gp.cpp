#include "contactlab/meanfield/gp.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>

#include "contactlab/error.hpp"
#include "contactlab/simd/kernels.hpp"

namespace contactlab {

namespace {

double table_value(const TableTrap& t, double r) {
  if (r <= t.r.front()) return t.v.front();
  if (r >= t.r.back()) return t.v.back();
  const auto it = std::upper_bound(t.r.begin(), t.r.end(), r);
  const std::size_t j = static_cast<std::size_t>(it - t.r.begin());
  const double w = (r - t.r[j - 1]) / (t.r[j] - t.r[j - 1]);
  return (1.0 - w) * t.v[j - 1] + w * t.v[j];
}

double shell_radius(const MeanFieldConfig& cfg) {
  if (const auto* s = std::get_if<ShellNonlinearity>(&cfg.nonlinearity)) return s->r0;
  return 0.0;
}

void check_shell_radius(double r0, const BoxGrid3D& grid) {
  if (!(r0 > grid.dx()) || !(r0 < grid.side() / 4.0))
    throw ValidationError("shell_r0", "shell radius must lie in (dx, side/4)");
}

// Trap values, shell symbol and the linear/nonlinear pieces on one grid.
class Model {
 public:
  Model(const MeanFieldConfig& cfg, const BoxGrid3D& grid) : cfg_(cfg), grid_(grid), v_(grid.size(), 0.0) {
    cfg.validate();
    if (cfg.grid && !(*cfg.grid == grid)) throw ValidationError("grid_mismatch", "field grid differs from the configured grid");
    const auto& r2 = grid.r2();
    if (const auto* h = std::get_if<HarmonicTrap>(&cfg.trap)) {
      for (std::size_t i = 0; i < v_.size(); ++i) v_[i] = h->omega * h->omega * r2[i];
    } else if (const auto* t = std::get_if<TableTrap>(&cfg.trap)) {
      for (std::size_t i = 0; i < v_.size(); ++i) v_[i] = table_value(*t, std::sqrt(r2[i]));
    }
    shell_ = std::holds_alternative<ShellNonlinearity>(cfg.nonlinearity);
    if (shell_) {
      const double r0 = shell_radius(cfg);
      check_shell_radius(r0, grid);
      symbol_ = shell_symbol(grid, r0);
    }
  }

  static std::vector<double> shell_symbol(const BoxGrid3D& grid, double r0) {
    const auto& ka = grid.kabs();
    std::vector<double> s(ka.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double x = ka[i] * r0;
      s[i] = x == 0.0 ? 1.0 : std::sin(x) / x;
    }
    return s;
  }

  const BoxGrid3D& grid() const { return grid_; }
  const std::vector<double>& v() const { return v_; }
  double g() const { return cfg_.g; }
  double dv() const { return grid_.cell_volume(); }

  // out = -Lap psi
  void kinetic(const cplx* psi, cplx* out) const {
    const std::size_t n = grid_.size();
    std::copy(psi, psi + n, out);
    fft_forward(grid_, out);
    simd::kernels().mul_real(out, grid_.k2().data(), n);
    fft_inverse(grid_, out);
  }
  // out = (-Lap + V) psi
  void hamiltonian(const cplx* psi, cplx* out) const {
    kinetic(psi, out);
    for (std::size_t i = 0; i < grid_.size(); ++i) out[i] += v_[i] * psi[i];
  }
  // s = |psi|^2 (cubic) or S[|psi|^2] (shell)
  void density_term(const cplx* psi, std::vector<double>& s) const {
    const std::size_t n = grid_.size();
    s.resize(n);
    simd::kernels().abs2(psi, s.data(), n);
    if (!shell_) return;
    std::vector<cplx> buf(s.begin(), s.end());
    fft_forward(grid_, buf.data());
    simd::kernels().mul_real(buf.data(), symbol_.data(), n);
    fft_inverse(grid_, buf.data());
    for (std::size_t i = 0; i < n; ++i) s[i] = buf[i].real();
  }

  double kinetic_energy(const cplx* psi) const {
    const std::size_t n = grid_.size();
    std::vector<cplx> buf(psi, psi + n);
    fft_forward(grid_, buf.data());
    const double m3 = static_cast<double>(n);
    return simd::kernels().wnorm2(buf.data(), grid_.k2().data(), n) * dv() / m3;
  }

  EnergyBreakdown energy(const WaveField& f) const {
    EnergyBreakdown e;
    const std::size_t n = grid_.size();
    std::vector<double> rho(n), s;
    simd::kernels().abs2(f.data(), rho.data(), n);
    e.kinetic = kinetic_energy(f.data());
    e.trap = simd::kernels().dot(v_.data(), rho.data(), n) * dv();
    density_term(f.data(), s);
    e.interaction = cfg_.g == 0.0 ? 0.0 : -cfg_.g * simd::kernels().dot(rho.data(), s.data(), n) * dv();
    e.total = e.kinetic + e.trap + e.interaction;
    return e;
  }

 private:
  MeanFieldConfig cfg_;
  BoxGrid3D grid_;
  std::vector<double> v_;
  bool shell_ = false;
  std::vector<double> symbol_;
};

double re_inner(const std::vector<cplx>& a, const std::vector<cplx>& b, double dv) {
  return simd::kernels().re_dot(a.data(), b.data(), a.size()) * dv;
}

void check_field(const WaveField& f) {
  if (!f.all_finite()) throw ValidationError("field_nonfinite", "field has non-finite entries");
}

}  // namespace

void MeanFieldConfig::validate() const {
  if (!(g >= 0.0) || !std::isfinite(g)) throw ValidationError("coupling", "g must be finite and nonnegative");
  if (!(mass > 0.0) || !std::isfinite(mass)) throw ValidationError("mass", "mass must be positive");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt", "dt must be positive");
  if (!(tol > 0.0)) throw ValidationError("tol", "tol must be positive");
  if (sample_every == 0) throw ValidationError("sample_every", "sample_every must be at least 1");
  if (const auto* h = std::get_if<HarmonicTrap>(&trap)) {
    if (!(h->omega > 0.0) || !std::isfinite(h->omega)) throw ValidationError("trap_omega", "omega must be positive");
  } else if (const auto* t = std::get_if<TableTrap>(&trap)) {
    if (t->r.size() < 2 || t->r.size() != t->v.size()) throw ValidationError("trap_table", "trap table needs >= 2 (r, v) pairs");
    for (std::size_t i = 0; i < t->r.size(); ++i) {
      if (!std::isfinite(t->r[i]) || !std::isfinite(t->v[i]) || t->v[i] < 0.0)
        throw ValidationError("trap_table", "trap table values must be finite and nonnegative");
      if (i > 0 && !(t->r[i] > t->r[i - 1])) throw ValidationError("trap_table", "trap radii must increase");
    }
  }
  if (const auto* s = std::get_if<ShellNonlinearity>(&nonlinearity)) {
    if (!(s->r0 > 0.0)) throw ValidationError("shell_r0", "shell radius must be positive");
    if (grid) check_shell_radius(s->r0, *grid);
  }
}

double field_width(const WaveField& f) {
  const auto& r2 = f.grid().r2();
  const double m = f.mass();
  if (m == 0.0) return 0.0;
  return simd::kernels().wnorm2(f.data(), r2.data(), f.size()) * f.grid().cell_volume() / m;
}

WaveField gaussian_field(const BoxGrid3D& grid, double s, double mass, std::array<double, 3> x0) {
  const std::size_t m = grid.m();
  std::vector<cplx> v(grid.size());
  for (std::size_t iz = 0; iz < m; ++iz)
    for (std::size_t iy = 0; iy < m; ++iy)
      for (std::size_t ix = 0; ix < m; ++ix) {
        const double dx = grid.coordinate(ix) - x0[0], dy = grid.coordinate(iy) - x0[1], dz = grid.coordinate(iz) - x0[2];
        v[grid.index(ix, iy, iz)] = std::exp(-(dx * dx + dy * dy + dz * dz) / (2.0 * s * s));
      }
  WaveField f(grid, std::move(v), mass);
  const double scale = std::sqrt(mass / f.mass());
  for (auto& z : f.values()) z *= scale;
  return f;
}

WaveField shell_nonlinearity(const WaveField& field, double r0) {
  check_shell_radius(r0, field.grid());
  check_field(field);
  const auto& grid = field.grid();
  const std::size_t n = grid.size();
  std::vector<double> rho(n);
  simd::kernels().abs2(field.data(), rho.data(), n);
  std::vector<cplx> buf(rho.begin(), rho.end());
  fft_forward(grid, buf.data());
  const auto sym = Model::shell_symbol(grid, r0);
  simd::kernels().mul_real(buf.data(), sym.data(), n);
  fft_inverse(grid, buf.data());
  WaveField out = WaveField::zeros(grid);
  for (std::size_t i = 0; i < n; ++i) out.values()[i] = field.values()[i] * buf[i].real();
  return out;
}

EnergyBreakdown gp_energy(const WaveField& field, const MeanFieldConfig& cfg) {
  check_field(field);
  return Model(cfg, field.grid()).energy(field);
}

WaveField gp_gradient(const WaveField& field, const MeanFieldConfig& cfg) {
  check_field(field);
  const Model model(cfg, field.grid());
  WaveField out = WaveField::zeros(field.grid());
  model.hamiltonian(field.data(), out.data());
  if (cfg.g != 0.0) {
    std::vector<double> s;
    model.density_term(field.data(), s);
    for (std::size_t i = 0; i < field.size(); ++i) out.values()[i] -= 2.0 * cfg.g * s[i] * field.values()[i];
  }
  return out;
}

WaveField gp_projected_gradient(const WaveField& field, const MeanFieldConfig& cfg, double* mu) {
  WaveField gr = gp_gradient(field, cfg);
  const double dv = field.grid().cell_volume();
  const double pp = field.mass();
  const double m = pp > 0.0 ? re_inner(field.values(), gr.values(), dv) / pp : 0.0;
  simd::kernels().axpby(-m, field.data(), 1.0, gr.data(), field.size());
  if (mu) *mu = m;
  return gr;
}

GPState ground_state(const MeanFieldConfig& cfg, const WaveField& init) {
  if (std::holds_alternative<NoTrap>(cfg.trap))
    throw ValidationError("trap_required", "ground states need a confining trap");
  check_field(init);
  if (!(init.mass() > 0.0)) throw ValidationError("init_zero", "initial field is zero");
  const Model model(cfg, init.grid());
  const auto& grid = init.grid();
  const std::size_t n = grid.size();
  const double dv = grid.cell_volume();
  const double g = cfg.g;
  const auto& K = simd::kernels();

  std::vector<cplx> phi = init.values();
  {
    const double s = std::sqrt(cfg.mass / init.mass());
    for (auto& z : phi) z *= s;
  }
  std::vector<cplx> hphi(n), hq(n), grad(n), r(n), z(n), d(n), q(n), r_prev, z_prev, d_prev, nl(n), tmp(n);
  std::vector<double> s;
  model.hamiltonian(phi.data(), hphi.data());

  auto interaction = [&](const std::vector<cplx>& f) {
    if (g == 0.0) return 0.0;
    std::vector<double> rho(n);
    K.abs2(f.data(), rho.data(), n);
    model.density_term(f.data(), s);
    return -g * K.dot(rho.data(), s.data(), n) * dv;
  };
  auto total_energy = [&](const std::vector<cplx>& f, const std::vector<cplx>& hf) {
    return re_inner(f, hf, dv) + interaction(f);
  };
  auto width = [&](const std::vector<cplx>& f) { return K.wnorm2(f.data(), grid.r2().data(), n) * dv / cfg.mass; };

  double energy = total_energy(phi, hphi);
  const double e_init = energy, w_init = width(phi);
  const double dx2 = grid.dx() * grid.dx();
  double res = 0.0, mu = 0.0;
  double rz_prev = 0.0;
  bool have_prev = false;
  std::size_t it = 0;

  for (;; ++it) {
    // gradient and residual at phi
    std::copy(hphi.begin(), hphi.end(), grad.begin());
    if (g != 0.0) {
      model.density_term(phi.data(), s);
      for (std::size_t i = 0; i < n; ++i) grad[i] -= 2.0 * g * s[i] * phi[i];
    }
    mu = re_inner(phi, grad, dv) / cfg.mass;
    for (std::size_t i = 0; i < n; ++i) r[i] = grad[i] - mu * phi[i];
    res = std::sqrt(K.norm2(r.data(), n) * dv);
    if (res <= cfg.tol) break;

    const double w = width(phi);
    if (w < 4.0 * dx2 || (energy < e_init - 10.0 * std::abs(e_init) && w < w_init))
      throw CollapseError("focusing collapse: energy " + std::to_string(energy) + ", width " + std::to_string(w),
                          std::make_shared<const WaveField>(grid, phi, cfg.mass));
    if (it >= cfg.max_iter)
      throw ConvergenceError("ground state did not reach tol within " + std::to_string(cfg.max_iter) + " iterations",
                             {res});

    // preconditioned residual, tangent to the sphere
    const double alpha = std::max(1.0, re_inner(phi, hphi, dv) / cfg.mass);
    std::copy(r.begin(), r.end(), z.begin());
    fft_forward(grid, z.data());
    const auto& k2 = grid.k2();
    for (std::size_t i = 0; i < n; ++i) z[i] /= (k2[i] + alpha);
    fft_inverse(grid, z.data());
    {
      const double c = re_inner(phi, z, dv) / cfg.mass;
      K.axpby(-c, phi.data(), 1.0, z.data(), n);
    }
    const double rz = re_inner(r, z, dv);
    double beta = 0.0;
    if (have_prev && rz_prev > 0.0) {
      double num = rz;
      num -= re_inner(r_prev, z, dv);
      beta = std::max(0.0, num / rz_prev);
    }
    for (std::size_t i = 0; i < n; ++i) d[i] = -z[i] + (have_prev ? beta * d_prev[i] : cplx{});
    {
      const double c = re_inner(phi, d, dv) / cfg.mass;
      K.axpby(-c, phi.data(), 1.0, d.data(), n);
    }
    if (!(re_inner(r, d, dv) < 0.0)) {
      for (std::size_t i = 0; i < n; ++i) d[i] = -z[i];
      beta = 0.0;
    }
    const double dn = std::sqrt(K.norm2(d.data(), n) * dv);
    if (!(dn > 0.0)) break;
    const double scale = std::sqrt(cfg.mass) / dn;
    for (std::size_t i = 0; i < n; ++i) q[i] = d[i] * scale;
    model.hamiltonian(q.data(), hq.data());

    // geodesic phi(t) = cos t phi + sin t q; dE/dt = 2 Re <G(phi(t)), phi'(t)>
    const double a = re_inner(phi, hphi, dv), b = re_inner(q, hphi, dv), e = re_inner(q, hq, dv);
    auto dE = [&](double t) {
      const double c = std::cos(t), sn = std::sin(t);
      double v = 2.0 * ((c * c - sn * sn) * b + c * sn * (e - a));
      if (g != 0.0) {
        for (std::size_t i = 0; i < n; ++i) tmp[i] = c * phi[i] + sn * q[i];
        model.density_term(tmp.data(), s);
        for (std::size_t i = 0; i < n; ++i) nl[i] = s[i] * tmp[i];
        for (std::size_t i = 0; i < n; ++i) tmp[i] = -sn * phi[i] + c * q[i];
        v -= 4.0 * g * re_inner(nl, tmp, dv);
      }
      return v;
    };
    const double d0 = dE(0.0);
    // minimizer of the quadratic part, used as the first trial
    double t1 = 0.5 * std::atan2(-2.0 * b, a - e);
    if (t1 <= 0.0) t1 += 0.5 * std::numbers::pi;
    t1 = std::clamp(t1, 1e-12, 0.5 * std::numbers::pi);
    double lo = 0.0, hi = t1, dhi = dE(hi);
    double tstar;
    const double dscale = std::abs(d0);
    if (std::abs(dhi) <= 1e-13 * dscale) {
      tstar = hi;
    } else {
      while (dhi < 0.0 && hi < 0.5 * std::numbers::pi) {
        lo = hi;
        hi = std::min(2.0 * hi, 0.5 * std::numbers::pi);
        dhi = dE(hi);
      }
      if (dhi < 0.0) {
        tstar = hi;
      } else {
        std::uintmax_t maxit = 60;
        auto br = boost::math::tools::toms748_solve(dE, lo, hi, lo == 0.0 ? d0 : dE(lo), dhi,
                                                    boost::math::tools::eps_tolerance<double>(50), maxit);
        tstar = 0.5 * (br.first + br.second);
      }
    }
    const double c = std::cos(tstar), sn = std::sin(tstar);
    std::vector<cplx> phi_new(n), hphi_new(n);
    for (std::size_t i = 0; i < n; ++i) {
      phi_new[i] = c * phi[i] + sn * q[i];
      hphi_new[i] = c * hphi[i] + sn * hq[i];
    }
    const double renorm = std::sqrt(cfg.mass / (K.norm2(phi_new.data(), n) * dv));
    for (std::size_t i = 0; i < n; ++i) {
      phi_new[i] *= renorm;
      hphi_new[i] *= renorm;
    }
    const double e_new = total_energy(phi_new, hphi_new);
    if (e_new > energy + 1e-12 * std::max(1.0, std::abs(energy))) {
      if (!have_prev) throw ConvergenceError("line search failed to decrease the energy", {res});
      have_prev = false;  // restart from steepest descent
      continue;
    }
    phi.swap(phi_new);
    hphi.swap(hphi_new);
    energy = e_new;
    r_prev = r;
    z_prev = z;
    d_prev = d;
    rz_prev = rz;
    have_prev = true;
  }

  WaveField field(grid, std::move(phi), cfg.mass);
  GPState st{field, model.energy(field), res, it, mu};
  return st;
}

Trajectory evolve(const WaveField& init, const MeanFieldConfig& cfg) {
  check_field(init);
  const Model model(cfg, init.grid());
  const auto& grid = init.grid();
  const std::size_t n = grid.size();
  if (cfg.dt * grid.k2_max() > std::numbers::pi)
    throw ValidationError("dt_unstable", "dt * max|k|^2 exceeds pi; reduce dt to at most " +
                                             std::to_string(std::numbers::pi / grid.k2_max()));
  const auto& K = simd::kernels();
  std::vector<cplx> half(n);
  const auto& k2 = grid.k2();
  for (std::size_t i = 0; i < n; ++i) half[i] = std::polar(1.0, -0.5 * cfg.dt * k2[i]);

  std::vector<cplx> psi = init.values(), last = psi;
  std::vector<double> s;
  Trajectory tr{{}, init};
  auto record = [&](std::size_t step) {
    WaveField f(grid, psi, init.norm_target());
    TrajectorySample smp;
    smp.time = static_cast<double>(step) * cfg.dt;
    smp.mass = f.mass();
    smp.energy = model.energy(f);
    if (cfg.snapshot_every > 0 && step % cfg.snapshot_every == 0) smp.snapshot = std::make_shared<const WaveField>(f);
    tr.samples.push_back(std::move(smp));
  };
  record(0);
  for (std::size_t step = 1; step <= cfg.steps; ++step) {
    fft_forward(grid, psi.data());
    K.mul_cplx(psi.data(), half.data(), n);
    fft_inverse(grid, psi.data());
    model.density_term(psi.data(), s);
    const auto& v = model.v();
    for (std::size_t i = 0; i < n; ++i) psi[i] *= std::polar(1.0, -cfg.dt * (v[i] - 2.0 * cfg.g * s[i]));
    fft_forward(grid, psi.data());
    K.mul_cplx(psi.data(), half.data(), n);
    fft_inverse(grid, psi.data());
    const bool finite = std::all_of(psi.begin(), psi.end(), [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
    if (!finite)
      throw CollapseError("non-finite field at step " + std::to_string(step),
                          std::make_shared<const WaveField>(grid, last, init.norm_target()));
    if (step % cfg.sample_every == 0 || step == cfg.steps) record(step);
    last = psi;
  }
  tr.final_field = WaveField(grid, std::move(psi), init.norm_target());
  return tr;
}

}  // namespace contactlab
