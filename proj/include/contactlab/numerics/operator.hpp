#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace contactlab {

// Factorization of (A - sigma I): solves and Sylvester inertia.
class ShiftedFactorization {
 public:
  virtual ~ShiftedFactorization() = default;
  virtual void solve(std::span<double> x) const = 0;
  // Number of eigenvalues of A strictly below sigma.
  virtual std::size_t negative_count() const = 0;
};

// Real symmetric operator in the Euclidean inner product.
class SymmetricOperator {
 public:
  virtual ~SymmetricOperator() = default;
  virtual std::size_t dim() const = 0;
  virtual void apply(std::span<const double> x, std::span<double> y) const = 0;
  virtual Eigen::MatrixXd assemble() const;
  // Gershgorin-type enclosure of the spectrum.
  virtual std::pair<double, double> spectral_bounds() const;
  // Throws NumericalError when A - sigma I is numerically singular.
  virtual std::unique_ptr<ShiftedFactorization> factorize(double sigma) const;
};

class TridiagonalOperator final : public SymmetricOperator {
 public:
  TridiagonalOperator(std::vector<double> diag, std::vector<double> off);
  std::size_t dim() const override { return diag_.size(); }
  void apply(std::span<const double> x, std::span<double> y) const override;
  Eigen::MatrixXd assemble() const override;
  std::pair<double, double> spectral_bounds() const override;
  std::unique_ptr<ShiftedFactorization> factorize(double sigma) const override;
  const std::vector<double>& diag() const noexcept { return diag_; }
  const std::vector<double>& off() const noexcept { return off_; }

 private:
  std::vector<double> diag_, off_;
};

class DenseOperator final : public SymmetricOperator {
 public:
  // Rejects matrices that are not symmetric to 1e-12 relative.
  explicit DenseOperator(Eigen::MatrixXd a);
  std::size_t dim() const override { return static_cast<std::size_t>(a_.rows()); }
  void apply(std::span<const double> x, std::span<double> y) const override;
  Eigen::MatrixXd assemble() const override { return a_; }
  std::pair<double, double> spectral_bounds() const override;
  std::unique_ptr<ShiftedFactorization> factorize(double sigma) const override;
  const Eigen::MatrixXd& matrix() const noexcept { return a_; }

 private:
  Eigen::MatrixXd a_;
};

std::pair<double, double> gershgorin(const Eigen::MatrixXd& a);
std::unique_ptr<ShiftedFactorization> factorize_dense(const Eigen::MatrixXd& a, double sigma);

// Number of eigenvalues strictly below x.
std::size_t count_below(const SymmetricOperator& op, double x);

// max |<u,Av> - <Au,v>| / (|Au||v| + |u||Av|) over random pairs.
double symmetry_defect(const SymmetricOperator& op, unsigned long long seed, int trials = 3);

// Full dense spectrum, ascending (LAPACK dsyevd).
std::vector<double> dense_eigenvalues(const Eigen::MatrixXd& a);

}  // namespace contactlab
