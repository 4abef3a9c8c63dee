#include "contactlab/numerics/operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "contactlab/error.hpp"
#include "contactlab/simd/kernels.hpp"
#include "lapack.hpp"

namespace contactlab {

Eigen::MatrixXd SymmetricOperator::assemble() const {
  const std::size_t n = dim();
  Eigen::MatrixXd a(n, n);
  std::vector<double> e(n, 0.0), col(n);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    apply(e, col);
    e[j] = 0.0;
    for (std::size_t i = 0; i < n; ++i) a(i, j) = col[i];
  }
  return a;
}

std::pair<double, double> SymmetricOperator::spectral_bounds() const { return gershgorin(assemble()); }

std::unique_ptr<ShiftedFactorization> SymmetricOperator::factorize(double sigma) const {
  return factorize_dense(assemble(), sigma);
}

std::pair<double, double> gershgorin(const Eigen::MatrixXd& a) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const double rad = a.row(i).cwiseAbs().sum() - std::abs(a(i, i));
    lo = std::min(lo, a(i, i) - rad);
    hi = std::max(hi, a(i, i) + rad);
  }
  return {lo, hi};
}

// ---------------------------------------------------------------- tridiagonal

TridiagonalOperator::TridiagonalOperator(std::vector<double> diag, std::vector<double> off)
    : diag_(std::move(diag)), off_(std::move(off)) {
  if (diag_.empty()) throw ValidationError("operator_dim", "empty operator");
  if (off_.size() + 1 != diag_.size()) throw ValidationError("operator_shape", "off-diagonal must have n-1 entries");
}

void TridiagonalOperator::apply(std::span<const double> x, std::span<double> y) const {
  const std::size_t n = diag_.size();
  for (std::size_t i = 0; i < n; ++i) {
    double s = diag_[i] * x[i];
    if (i > 0) s += off_[i - 1] * x[i - 1];
    if (i + 1 < n) s += off_[i] * x[i + 1];
    y[i] = s;
  }
}

Eigen::MatrixXd TridiagonalOperator::assemble() const {
  const auto n = static_cast<Eigen::Index>(diag_.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, i) = diag_[i];
    if (i + 1 < n) a(i, i + 1) = a(i + 1, i) = off_[i];
  }
  return a;
}

std::pair<double, double> TridiagonalOperator::spectral_bounds() const {
  const std::size_t n = diag_.size();
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < n; ++i) {
    double rad = 0.0;
    if (i > 0) rad += std::abs(off_[i - 1]);
    if (i + 1 < n) rad += std::abs(off_[i]);
    lo = std::min(lo, diag_[i] - rad);
    hi = std::max(hi, diag_[i] + rad);
  }
  return {lo, hi};
}

namespace {

class TridiagonalFactorization final : public ShiftedFactorization {
 public:
  TridiagonalFactorization(const std::vector<double>& d, const std::vector<double>& e, double sigma)
      : n_(d.size()), dl_(e), du_(e), du2_(d.size() > 2 ? d.size() - 2 : 1), ipiv_(d.size()) {
    diag_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) diag_[i] = d[i] - sigma;
    count_ = sturm_count(d, e, sigma);
    const lapack_int info = LAPACKE_dgttrf(static_cast<lapack_int>(n_), dl_.data(), diag_.data(), du_.data(),
                                           du2_.data(), ipiv_.data());
    if (info != 0) throw NumericalError("tridiagonal factorization singular at shift " + std::to_string(sigma));
  }

  void solve(std::span<double> x) const override {
    const lapack_int info = LAPACKE_dgttrs(LAPACK_COL_MAJOR, 'N', static_cast<lapack_int>(n_), 1, dl_.data(),
                                           diag_.data(), du_.data(), du2_.data(), ipiv_.data(), x.data(),
                                           static_cast<lapack_int>(n_));
    if (info != 0) throw NumericalError("tridiagonal solve failed");
  }

  std::size_t negative_count() const override { return count_; }

 private:
  static std::size_t sturm_count(const std::vector<double>& d, const std::vector<double>& e, double sigma) {
    double emax = 0.0;
    for (double v : e) emax = std::max(emax, v * v);
    const double pivmin = std::numeric_limits<double>::min() * std::max(1.0, emax);
    std::size_t count = 0;
    double q = d[0] - sigma;
    for (std::size_t i = 0;; ++i) {
      if (std::abs(q) < pivmin) q = -pivmin;
      if (q < 0) ++count;
      if (i + 1 == d.size()) break;
      q = d[i + 1] - sigma - e[i] * e[i] / q;
    }
    return count;
  }

  std::size_t n_;
  std::vector<double> dl_, du_, du2_, diag_;
  std::vector<lapack_int> ipiv_;
  std::size_t count_ = 0;
};

class DenseFactorization final : public ShiftedFactorization {
 public:
  DenseFactorization(Eigen::MatrixXd a, double sigma) : lu_(std::move(a)), ipiv_(lu_.rows()) {
    const auto n = lu_.rows();
    for (Eigen::Index i = 0; i < n; ++i) lu_(i, i) -= sigma;
    const lapack_int info =
        LAPACKE_dsytrf(LAPACK_COL_MAJOR, 'L', static_cast<lapack_int>(n), lu_.data(), static_cast<lapack_int>(n),
                       ipiv_.data());
    if (info != 0) throw NumericalError("dense factorization singular at shift " + std::to_string(sigma));
    // Inertia of the block-diagonal factor D.
    for (Eigen::Index i = 0; i < n;) {
      if (ipiv_[i] > 0) {
        if (lu_(i, i) < 0) ++count_;
        ++i;
      } else {
        const double a11 = lu_(i, i), a21 = lu_(i + 1, i), a22 = lu_(i + 1, i + 1);
        const double det = a11 * a22 - a21 * a21;
        if (det < 0) ++count_;
        else if (a11 + a22 < 0) count_ += 2;
        i += 2;
      }
    }
  }

  void solve(std::span<double> x) const override {
    const auto n = static_cast<lapack_int>(lu_.rows());
    const lapack_int info = LAPACKE_dsytrs(LAPACK_COL_MAJOR, 'L', n, 1, lu_.data(), n, ipiv_.data(), x.data(), n);
    if (info != 0) throw NumericalError("dense solve failed");
  }

  std::size_t negative_count() const override { return count_; }

 private:
  Eigen::MatrixXd lu_;
  std::vector<lapack_int> ipiv_;
  std::size_t count_ = 0;
};

}  // namespace

std::unique_ptr<ShiftedFactorization> TridiagonalOperator::factorize(double sigma) const {
  return std::make_unique<TridiagonalFactorization>(diag_, off_, sigma);
}

std::unique_ptr<ShiftedFactorization> factorize_dense(const Eigen::MatrixXd& a, double sigma) {
  return std::make_unique<DenseFactorization>(a, sigma);
}

// ---------------------------------------------------------------- dense

DenseOperator::DenseOperator(Eigen::MatrixXd a) : a_(std::move(a)) {
  if (a_.rows() == 0 || a_.rows() != a_.cols()) throw ValidationError("operator_shape", "matrix must be square and nonempty");
  const double scale = std::max(a_.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  if ((a_ - a_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw ValidationError("operator_asymmetric", "matrix is not symmetric");
  if (!a_.allFinite()) throw ValidationError("operator_nonfinite", "matrix has non-finite entries");
}

void DenseOperator::apply(std::span<const double> x, std::span<double> y) const {
  const auto n = a_.rows();
  Eigen::Map<const Eigen::VectorXd> xv(x.data(), n);
  Eigen::Map<Eigen::VectorXd> yv(y.data(), n);
  yv.noalias() = a_ * xv;
}

std::pair<double, double> DenseOperator::spectral_bounds() const { return gershgorin(a_); }

std::unique_ptr<ShiftedFactorization> DenseOperator::factorize(double sigma) const { return factorize_dense(a_, sigma); }

// ---------------------------------------------------------------- helpers

std::size_t count_below(const SymmetricOperator& op, double x) { return op.factorize(x)->negative_count(); }

double symmetry_defect(const SymmetricOperator& op, unsigned long long seed, int trials) {
  const std::size_t n = op.dim();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<double> u(n), v(n), au(n), av(n);
  const auto& k = simd::kernels();
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    for (auto& x : u) x = nd(rng);
    for (auto& x : v) x = nd(rng);
    op.apply(u, au);
    op.apply(v, av);
    const double a = k.dot(u.data(), av.data(), n), b = k.dot(au.data(), v.data(), n);
    const double scale = std::sqrt(k.dot(au.data(), au.data(), n) * k.dot(v.data(), v.data(), n)) +
                         std::sqrt(k.dot(u.data(), u.data(), n) * k.dot(av.data(), av.data(), n));
    if (scale > 0) worst = std::max(worst, std::abs(a - b) / scale);
  }
  return worst;
}

std::vector<double> dense_eigenvalues(const Eigen::MatrixXd& a) {
  const auto n = static_cast<lapack_int>(a.rows());
  Eigen::MatrixXd work = a;
  std::vector<double> w(static_cast<std::size_t>(n));
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', n, work.data(), n, w.data());
  if (info != 0) throw NumericalError("dense eigensolver failed (dsyevd info " + std::to_string(info) + ")");
  return w;
}

}  // namespace contactlab
