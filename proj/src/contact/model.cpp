#include "contactlab/contact/model.hpp"

#include <algorithm>
#include <cmath>

#include "contactlab/error.hpp"

namespace contactlab {

std::string to_string(ContactKind k) { return k == ContactKind::strong ? "strong" : "weak"; }

ContactKind contact_kind_from_string(const std::string& s) {
  if (s == "strong") return ContactKind::strong;
  if (s == "weak") return ContactKind::weak;
  throw ValidationError("contact_kind", "unknown contact kind '" + s + "'");
}

namespace {

std::shared_ptr<const Eigen::MatrixXd> b_action(const Eigen::MatrixXd& b, const RadialGrid& grid) {
  const auto n = static_cast<Eigen::Index>(grid.n());
  if (b.rows() != n || b.cols() != n) throw ValidationError("b_kernel_shape", "b_kernel must be n x n on the grid");
  if (!b.allFinite()) throw ValidationError("b_kernel_nonfinite", "b_kernel has non-finite entries");
  const double scale = std::max(b.cwiseAbs().maxCoeff(), 1e-300);
  if ((b - b.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw ValidationError("b_kernel_asymmetric", "b_kernel is not symmetric");
  Eigen::VectorXd sw(n);
  for (Eigen::Index i = 0; i < n; ++i) sw(i) = std::sqrt(grid.weights()[i]);
  auto a = std::make_shared<Eigen::MatrixXd>(sw.asDiagonal() * (0.5 * (b + b.transpose())) * sw.asDiagonal());
  const auto ev = dense_eigenvalues(*a);
  const double tol = 1e-12 * std::max(std::abs(ev.front()), std::abs(ev.back()));
  if (ev.front() < -tol)
    throw ValidationError("b_kernel_not_positive",
                          "b_kernel is not positive semidefinite (min eigenvalue " + std::to_string(ev.front()) + ")");
  return a;
}

}  // namespace

ContactModelOperator::ContactModelOperator(ContactKind kind, double C, RadialGrid grid,
                                           std::shared_ptr<const Eigen::MatrixXd> base,
                                           std::shared_ptr<const Eigen::MatrixXd> b)
    : kind_(kind), C_(C), grid_(std::move(grid)), base_(std::move(base)), b_(std::move(b)), matrix_(*base_) {
  if (b_) matrix_ += *b_;
  for (std::size_t i = 0; i < grid_.n(); ++i) {
    const double r = grid_[i];
    matrix_(i, i) -= kind_ == ContactKind::strong ? C_ / r : C_ * std::log(r);
  }
}

ContactModelOperator ContactModelOperator::build(ContactKind kind, double C, const RadialGrid& grid,
                                                 const std::optional<Eigen::MatrixXd>& b_kernel) {
  if (!(C >= 0.0) || !std::isfinite(C)) throw ValidationError("coupling", "C must be finite and nonnegative");
  std::shared_ptr<const Eigen::MatrixXd> b;
  if (b_kernel) b = b_action(*b_kernel, grid);
  auto base = std::make_shared<const Eigen::MatrixXd>(half_line_sqrt_laplacian(grid));
  return ContactModelOperator(kind, C, grid, std::move(base), std::move(b));
}

ContactModelOperator ContactModelOperator::with_coupling(double C) const {
  if (!(C >= 0.0) || !std::isfinite(C)) throw ValidationError("coupling", "C must be finite and nonnegative");
  return ContactModelOperator(kind_, C, grid_, base_, b_);
}

void ContactModelOperator::apply(std::span<const double> x, std::span<double> y) const {
  const auto n = static_cast<Eigen::Index>(dim());
  Eigen::Map<Eigen::VectorXd>(y.data(), n).noalias() = matrix_ * Eigen::Map<const Eigen::VectorXd>(x.data(), n);
}

std::pair<double, double> ContactModelOperator::spectral_bounds() const { return gershgorin(matrix_); }

std::unique_ptr<ShiftedFactorization> ContactModelOperator::factorize(double sigma) const {
  return factorize_dense(matrix_, sigma);
}

SpectrumResult efimov_sequence(const ContactModelOperator& op, const EigenRequest& req) {
  if (req.k < 1) throw ValidationError("eig_k", "k must be at least 1");
  SpectrumResult res = eigs_below(op, 0.0, req);
  res.truncated = res.eigenvalues.size() < req.k;
  const auto& g = op.grid();
  res.grid_meta = GridMeta{std::string(to_string(g.law())), g.n(), g.r_min(), g.r_max()};
  return res;
}

}  // namespace contactlab
