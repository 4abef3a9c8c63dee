#include "contactlab/numerics/box.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "contactlab/error.hpp"
#include "fftw_lock.hpp"
#include "contactlab/simd/kernels.hpp"

namespace contactlab {

struct BoxGrid3D::Tables {
  std::once_flag once;
  std::vector<double> k2, kabs, r2;
  double k2_max = 0.0;
};

BoxGrid3D BoxGrid3D::make(std::size_t m, double side) {
  if (m < 8 || (m & (m - 1)) != 0) throw ValidationError("box_m", "points per axis must be a power of two >= 8");
  if (!(side > 0.0) || !std::isfinite(side)) throw ValidationError("box_side", "side must be positive");
  BoxGrid3D g;
  g.m_ = m;
  g.side_ = side;
  g.tables_ = std::make_shared<Tables>();
  return g;
}

double BoxGrid3D::wavenumber(std::size_t j) const noexcept {
  const double base = 2.0 * std::numbers::pi / side_;
  const auto mj = static_cast<long>(j), half = static_cast<long>(m_ / 2);
  return base * static_cast<double>(mj < half ? mj : mj - static_cast<long>(m_));
}

namespace {

void build_tables(const BoxGrid3D& g, std::vector<double>& k2, std::vector<double>& kabs, std::vector<double>& r2,
                  double& k2max) {
  const std::size_t m = g.m();
  std::vector<double> k(m), x(m);
  for (std::size_t j = 0; j < m; ++j) {
    k[j] = g.wavenumber(j);
    x[j] = g.coordinate(j);
  }
  k2.resize(g.size());
  kabs.resize(g.size());
  r2.resize(g.size());
  k2max = 0.0;
  for (std::size_t iz = 0; iz < m; ++iz)
    for (std::size_t iy = 0; iy < m; ++iy)
      for (std::size_t ix = 0; ix < m; ++ix) {
        const std::size_t p = g.index(ix, iy, iz);
        k2[p] = k[ix] * k[ix] + k[iy] * k[iy] + k[iz] * k[iz];
        kabs[p] = std::sqrt(k2[p]);
        r2[p] = x[ix] * x[ix] + x[iy] * x[iy] + x[iz] * x[iz];
        k2max = std::max(k2max, k2[p]);
      }
}

}  // namespace

const std::vector<double>& BoxGrid3D::k2() const {
  std::call_once(tables_->once, [&] { build_tables(*this, tables_->k2, tables_->kabs, tables_->r2, tables_->k2_max); });
  return tables_->k2;
}
const std::vector<double>& BoxGrid3D::kabs() const { k2(); return tables_->kabs; }
const std::vector<double>& BoxGrid3D::r2() const { k2(); return tables_->r2; }
double BoxGrid3D::k2_max() const { k2(); return tables_->k2_max; }

WaveField::WaveField(BoxGrid3D grid, std::vector<cplx> values, std::optional<double> norm_target)
    : grid_(std::move(grid)), values_(std::move(values)), norm_target_(norm_target) {
  if (values_.size() != grid_.size()) throw ValidationError("field_size", "wave field size does not match m^3");
  if (norm_target_ && !(*norm_target_ > 0.0)) throw ValidationError("norm_target", "mass target must be positive");
}

WaveField WaveField::zeros(const BoxGrid3D& grid) { return WaveField(grid, std::vector<cplx>(grid.size())); }

double WaveField::mass() const { return simd::kernels().norm2(values_.data(), values_.size()) * grid_.cell_volume(); }

bool WaveField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](const cplx& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

namespace {

struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;
};

// Plans are made once per size under a lock (planning is not thread-safe);
// execution through the new-array interface is.
const PlanPair& plans_for(std::size_t m) {
  static std::map<std::size_t, PlanPair> cache;
  std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
  auto it = cache.find(m);
  if (it != cache.end()) return it->second;
  const int mi = static_cast<int>(m);
  auto* buf = fftw_alloc_complex(m * m * m);
  PlanPair p;
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  p.fwd = fftw_plan_dft_3d(mi, mi, mi, buf, buf, FFTW_FORWARD, flags);
  p.inv = fftw_plan_dft_3d(mi, mi, mi, buf, buf, FFTW_BACKWARD, flags);
  fftw_free(buf);
  if (!p.fwd || !p.inv) throw NumericalError("FFTW planning failed");
  return cache.emplace(m, p).first->second;
}

}  // namespace

void fft_forward(const BoxGrid3D& grid, cplx* data) {
  auto* d = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plans_for(grid.m()).fwd, d, d);
}

void fft_inverse(const BoxGrid3D& grid, cplx* data) {
  auto* d = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plans_for(grid.m()).inv, d, d);
  const double s = 1.0 / static_cast<double>(grid.size());
  simd::kernels().axpby(0.0, data, s, data, grid.size());
}

WaveField apply_kinetic(const WaveField& field, double order) {
  if (order != 1.0 && order != 2.0) throw ValidationError("kinetic_order", "order must be 1 or 2");
  if (!field.all_finite()) throw ValidationError("field_nonfinite", "kinetic operator applied to non-finite field");
  WaveField out = field;
  const auto& g = field.grid();
  fft_forward(g, out.data());
  simd::kernels().mul_real(out.data(), (order == 2.0 ? g.k2() : g.kabs()).data(), out.size());
  fft_inverse(g, out.data());
  return out;
}

}  // namespace contactlab
