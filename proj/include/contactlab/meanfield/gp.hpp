#pragma once

#include <array>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "contactlab/numerics/box.hpp"

namespace contactlab {

struct NoTrap {};
// V = omega^2 |x|^2, so -Lap + V has ground energy 3 omega.
struct HarmonicTrap {
  double omega = 1.0;
};
// Radial table V(|x|), piecewise linear, constant past the last sample.
struct TableTrap {
  std::vector<double> r, v;
};
using Trap = std::variant<NoTrap, HarmonicTrap, TableTrap>;

struct CubicNonlinearity {};
// Spherical-surface average of |psi|^2 at radius r0.
struct ShellNonlinearity {
  double r0 = 0.0;
};
using Nonlinearity = std::variant<CubicNonlinearity, ShellNonlinearity>;

struct MeanFieldConfig {
  double g = 0.0;
  Trap trap = HarmonicTrap{};
  Nonlinearity nonlinearity = CubicNonlinearity{};
  double mass = 1.0;
  double dt = 1e-3;
  std::size_t steps = 1000;
  std::size_t sample_every = 10;    // evolve: record every this many steps (and the last)
  std::size_t snapshot_every = 0;   // evolve: keep a field copy every this many steps, 0 = none
  double tol = 1e-8;                // ground_state: projected-gradient target
  std::size_t max_iter = 2000;      // ground_state: iteration cap
  std::optional<BoxGrid3D> grid;    // when set, fields must live on this grid

  void validate() const;
};

struct EnergyBreakdown {
  double kinetic = 0.0;
  double trap = 0.0;
  double interaction = 0.0;
  double total = 0.0;
};

struct GPState {
  WaveField field;
  EnergyBreakdown energy;
  double gradient_residual = 0.0;
  std::size_t iterations = 0;
  double chemical_potential = 0.0;
};

EnergyBreakdown gp_energy(const WaveField& field, const MeanFieldConfig& cfg);

// G = (-Lap + V) phi - 2 g N[phi]; the first variation of the energy is
// dE = 2 Re <G, dphi>.
WaveField gp_gradient(const WaveField& field, const MeanFieldConfig& cfg);

// G - mu phi with mu = Re<phi, G>/<phi, phi>; its L2 norm is the residual.
WaveField gp_projected_gradient(const WaveField& field, const MeanFieldConfig& cfg, double* mu = nullptr);

// psi * S[|psi|^2], S the normalized spherical mean at radius r0 (spectral).
WaveField shell_nonlinearity(const WaveField& field, double r0);

// Preconditioned nonlinear conjugate gradients on the mass sphere, geodesic
// line search. Throws CollapseError on focusing collapse, ConvergenceError at
// the iteration cap.
GPState ground_state(const MeanFieldConfig& cfg, const WaveField& init);

struct TrajectorySample {
  double time = 0.0;
  double mass = 0.0;
  EnergyBreakdown energy;
  std::shared_ptr<const WaveField> snapshot;  // null unless requested
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  WaveField final_field;
};

// Strang split-step: half kinetic, nonlinear + trap phase, half kinetic.
// Requires dt * max|k|^2 <= pi.
Trajectory evolve(const WaveField& init, const MeanFieldConfig& cfg);

// sum |x|^2 |psi|^2 dx^3 / mass
double field_width(const WaveField& field);

// Gaussian c exp(-|x - x0|^2 / (2 s^2)) normalized to `mass`.
WaveField gaussian_field(const BoxGrid3D& grid, double s, double mass, std::array<double, 3> x0 = {0, 0, 0});

}  // namespace contactlab
