#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

namespace contactlab {

using cplx = std::complex<double>;

// Periodic cube [-L/2, L/2)^3 with m points per axis, x index fastest.
class BoxGrid3D {
 public:
  static BoxGrid3D make(std::size_t m, double side);

  std::size_t m() const noexcept { return m_; }
  double side() const noexcept { return side_; }
  double dx() const noexcept { return side_ / static_cast<double>(m_); }
  double cell_volume() const noexcept { const double h = dx(); return h * h * h; }
  std::size_t size() const noexcept { return m_ * m_ * m_; }
  std::size_t index(std::size_t ix, std::size_t iy, std::size_t iz) const noexcept { return ix + m_ * (iy + m_ * iz); }

  double coordinate(std::size_t j) const noexcept { return -0.5 * side_ + dx() * static_cast<double>(j); }
  // FFT ordering: 0, 1, ..., m/2-1, -m/2, ..., -1 in units of 2pi/L.
  double wavenumber(std::size_t j) const noexcept;

  // Cached per-point tables.
  const std::vector<double>& k2() const;
  const std::vector<double>& kabs() const;
  const std::vector<double>& r2() const;
  double k2_max() const;

  bool operator==(const BoxGrid3D& o) const noexcept { return m_ == o.m_ && side_ == o.side_; }

 private:
  struct Tables;
  BoxGrid3D() = default;
  std::size_t m_ = 0;
  double side_ = 0.0;
  std::shared_ptr<Tables> tables_;
};

class WaveField {
 public:
  WaveField(BoxGrid3D grid, std::vector<cplx> values, std::optional<double> norm_target = std::nullopt);
  static WaveField zeros(const BoxGrid3D& grid);

  const BoxGrid3D& grid() const noexcept { return grid_; }
  const std::vector<cplx>& values() const noexcept { return values_; }
  std::vector<cplx>& values() noexcept { return values_; }
  cplx* data() noexcept { return values_.data(); }
  const cplx* data() const noexcept { return values_.data(); }
  std::size_t size() const noexcept { return values_.size(); }
  std::optional<double> norm_target() const noexcept { return norm_target_; }
  void set_norm_target(std::optional<double> t) { norm_target_ = t; }

  // sum |psi|^2 dx^3
  double mass() const;
  bool all_finite() const;

 private:
  BoxGrid3D grid_;
  std::vector<cplx> values_;
  std::optional<double> norm_target_;
};

// In-place unnormalized forward transform and normalized inverse (1/m^3).
void fft_forward(const BoxGrid3D& grid, cplx* data);
void fft_inverse(const BoxGrid3D& grid, cplx* data);

// |k|^order multiplier, order in {1, 2}.
WaveField apply_kinetic(const WaveField& field, double order);

}  // namespace contactlab
