#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "contactlab/numerics/eigen.hpp"
#include "contactlab/numerics/radial_grid.hpp"

namespace contactlab {

enum class ContactKind { strong, weak };

std::string to_string(ContactKind k);
ContactKind contact_kind_from_string(const std::string& s);

// sqrt(-d^2/dr^2) on s-wave fields u = r phi over the node set, symmetric.
// Uniform grids: sine-basis multiplier k_m = m pi / L with the grid's
// boundary points as Dirichlet ends. Logarithmic grids: P1 Galerkin form of
// the half-line operator with a lumped mass matrix.
Eigen::MatrixXd half_line_sqrt_laplacian(const RadialGrid& grid);

// sqrt(H0) - C/r + B (strong) or sqrt(H0) - C log r + B (weak).
class ContactModelOperator final : public SymmetricOperator {
 public:
  // b_kernel holds samples B(r_i, r_j); it acts as sum_j B_ij w_j u_j.
  static ContactModelOperator build(ContactKind kind, double C, const RadialGrid& grid,
                                    const std::optional<Eigen::MatrixXd>& b_kernel = std::nullopt);
  // Same grid, kinetic part and B, new coupling.
  ContactModelOperator with_coupling(double C) const;

  std::size_t dim() const override { return grid_.n(); }
  void apply(std::span<const double> x, std::span<double> y) const override;
  Eigen::MatrixXd assemble() const override { return matrix_; }
  std::pair<double, double> spectral_bounds() const override;
  std::unique_ptr<ShiftedFactorization> factorize(double sigma) const override;

  ContactKind kind() const noexcept { return kind_; }
  double coupling() const noexcept { return C_; }
  const RadialGrid& grid() const noexcept { return grid_; }
  bool has_b() const noexcept { return static_cast<bool>(b_); }
  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }

 private:
  ContactModelOperator(ContactKind kind, double C, RadialGrid grid, std::shared_ptr<const Eigen::MatrixXd> base,
                       std::shared_ptr<const Eigen::MatrixXd> b);
  ContactKind kind_;
  double C_;
  RadialGrid grid_;
  std::shared_ptr<const Eigen::MatrixXd> base_;  // kinetic part
  std::shared_ptr<const Eigen::MatrixXd> b_;     // symmetrized B action
  Eigen::MatrixXd matrix_;
};

// Negative eigenvalues, ascending, at most req.k. truncated is set when fewer
// than req.k negatives exist.
SpectrumResult efimov_sequence(const ContactModelOperator& op, const EigenRequest& req);

enum class FitModel { sqrt_n, log_n, geometric };
std::string to_string(FitModel m);
FitModel fit_model_from_string(const std::string& s);

struct FitReport {
  FitModel model;
  std::vector<double> params;  // sqrt_n: {c}; log_n: {b}; geometric: {A, kappa}
  double rms_residual = 0.0;
  std::size_t n_used = 0;
};

// Least squares on the nonpositive eigenvalues. sqrt_n and geometric number
// the tower from the deepest state (n = 1 most negative, accumulating at 0);
// log_n numbers it from the shallowest (n = 1 nearest 0, diverging downward).
FitReport fit_asymptotics(const SpectrumResult& seq, FitModel model);
// All three models, best (smallest rms) first.
std::vector<FitReport> fit_all(const SpectrumResult& seq);

struct RefinementEntry {
  double r_min;
  std::size_t negative_count;
};

struct CriticalConstants {
  double c1 = 0.0;                  // extrapolated first-negative threshold
  double c2 = 0.0;                  // smallest C with strictly increasing counts across levels
  bool c2_found = false;
  double c2_probe = 0.0;            // C at which refinement_trace was recorded
  std::vector<RefinementEntry> refinement_trace;
  std::vector<double> c1_levels;    // per-level thresholds, coarse to fine
  std::vector<double> window_limits;  // extrapolations from each contiguous window of >= 3 levels
  double limit_lo = 0.0, limit_hi = 0.0;
  double stability = 0.0;           // max |window - c1| / c1
};

struct CriticalOptions {
  double probe_tol = 1e-9;  // bisection width on C
  double c_max = 8.0;       // search ceiling
  double c2_scan_step = 0.05;
};

// Levels must have r_min halving from one to the next (at least 4 levels).
// Extrapolation model across levels: c(r_min) = c + a / (ln(r_max / r_min) + b)^2.
CriticalConstants critical_constants(ContactKind kind, const std::vector<RadialGrid>& family,
                                     const CriticalOptions& opt = {});

struct LimitFit {
  double limit, a, b, rss;
};
LimitFit extrapolate_log_model(const std::vector<double>& log_ratio, const std::vector<double>& values);

}  // namespace contactlab
