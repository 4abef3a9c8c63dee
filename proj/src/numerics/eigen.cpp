#include "contactlab/numerics/eigen.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "contactlab/error.hpp"
#include "contactlab/simd/kernels.hpp"

namespace contactlab {
namespace {

using Vec = std::vector<double>;

struct Locked {
  double lambda;
  double residual;
  Vec x;
};

class ShiftInvertLanczos {
 public:
  ShiftInvertLanczos(const SymmetricOperator& op, const EigenRequest& req)
      : op_(op), req_(req), n_(op.dim()), k_(simd::kernels()), rng_(req.seed) {
    const auto [lo, hi] = op.spectral_bounds();
    lo_ = lo;
    hi_ = hi;
    scale_ = std::max({std::abs(lo), std::abs(hi), 1.0});
    // Locked values sit within tol of a true eigenvalue; keep probe points
    // well clear of that band and of rounding in the factorization.
    gap_ = std::max(20.0 * req.tol, 1e-13 * scale_);
    // Residuals cannot drop below the rounding floor of the operator apply.
    res_tol_ = std::max(req.tol, 32.0 * std::numeric_limits<double>::epsilon() * scale_);
  }

  SpectrumResult run() {
    const std::size_t want = req_.k;
    double sigma = lo_ - 1e-3 * (hi_ - lo_) - 1e-3 * scale_;
    std::vector<double> estimates;
    for (std::size_t pass = 0;; ++pass) {
      if (steps_ >= req_.max_iter || pass > 200) fail();
      estimates = lanczos_pass(sigma);
      std::sort(locked_.begin(), locked_.end(), [](const Locked& a, const Locked& b) { return a.lambda < b.lambda; });

      if (locked_.empty()) {
        double next = std::numeric_limits<double>::infinity();
        for (double e : estimates) next = std::min(next, e);
        // aim just below the lowest estimate, whichever side of sigma it is on
        if (std::isfinite(next)) sigma = next - 1e-3 * std::abs(next - sigma);
        else sigma += 0.5 * (hi_ - sigma);
        continue;
      }
      // Nothing may hide below the cluster holding the k-th value.
      const std::size_t last = std::min(want, locked_.size()) - 1;
      const double probe = locked_[cluster_begin(last)].lambda - gap_;
      if (count(probe) > count_locked_below(probe)) {
        sigma = locate_missing(probe);
        continue;
      }
      if (locked_.size() >= want) return finish();
      const double top = locked_.back().lambda + gap_;
      if (count(top) > locked_.size()) {
        sigma = locate_missing(top);
        continue;
      }
      // Complete up to the top; aim just below the next estimate above it.
      double next = std::numeric_limits<double>::infinity();
      for (double e : estimates)
        if (e > top) next = std::min(next, e);
      if (!std::isfinite(next)) next = top + std::max(std::abs(top - sigma), 1e-3 * scale_);
      sigma = next - 0.05 * (next - top);
    }
  }

  std::size_t steps() const { return steps_; }
  std::size_t factorizations() const { return facts_; }

 private:
  [[noreturn]] void fail() {
    std::vector<double> res;
    for (const auto& l : locked_) res.push_back(l.residual);
    throw ConvergenceError("eigensolver did not converge: " + std::to_string(locked_.size()) + " of " +
                               std::to_string(req_.k) + " pairs after " + std::to_string(steps_) + " steps",
                           res);
  }

  std::unique_ptr<ShiftedFactorization> factor(double& sigma) {
    for (int attempt = 0; attempt < 6; ++attempt) {
      try {
        ++facts_;
        return op_.factorize(sigma);
      } catch (const NumericalError&) {
        // Landed on an eigenvalue; nudge off it.
        sigma += 1e-10 * std::max(1.0, std::abs(sigma)) * static_cast<double>(attempt + 1);
      }
    }
    throw NumericalError("cannot factorize shifted operator near " + std::to_string(sigma));
  }

  std::size_t count(double x) { return factor(x)->negative_count(); }

  std::size_t count_locked_below(double x) const {
    return static_cast<std::size_t>(std::count_if(locked_.begin(), locked_.end(),
                                                  [x](const Locked& l) { return l.lambda < x; }));
  }

  // Index of the first member of the cluster containing locked_[i].
  std::size_t cluster_begin(std::size_t i) const {
    while (i > 0 && locked_[i].lambda - locked_[i - 1].lambda <= 2.0 * gap_) --i;
    return i;
  }

  // count(probe) exceeds the locked values below it. Find the lowest gap
  // between clusters that lost an eigenvalue and narrow it by counts.
  double locate_missing(double probe) {
    std::vector<std::size_t> starts;
    for (std::size_t i = 0; i < locked_.size() && locked_[i].lambda < probe; i = next_cluster(i)) starts.push_back(i);
    auto probe_at = [&](std::size_t j) { return j < starts.size() ? locked_[starts[j]].lambda - gap_ : probe; };
    std::size_t lo = 0, hi = starts.size();
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      const double p = probe_at(mid);
      if (count(p) > count_locked_below(p)) hi = mid;
      else lo = mid + 1;
    }
    double b = probe_at(lo);
    double a = lo == 0 ? lo_ - 1e-3 * scale_ : locked_[(lo < starts.size() ? starts[lo] : next_cluster(starts[lo - 1])) - 1].lambda + gap_;
    if (!(a < b)) a = b - gap_;
    const std::size_t expect = count_locked_below(b);
    // at least 12 halvings, then on until the bracket is narrow relative to
    // its position (Gershgorin floors can sit far below the spectrum)
    for (int it = 0; it < 200 && b - a > 4.0 * gap_ && (it < 12 || b - a > 1e-2 * (std::abs(a) + std::abs(b))); ++it) {
      const double mid = 0.5 * (a + b);
      if (count(mid) > expect) b = mid;
      else a = mid;
    }
    return 0.5 * (a + b);
  }

  std::size_t next_cluster(std::size_t i) const {
    ++i;
    while (i < locked_.size() && locked_[i].lambda - locked_[i - 1].lambda <= 2.0 * gap_) ++i;
    return i;
  }

  void project_out(Vec& w, const std::vector<Vec>& basis) const {
    for (const auto& b : basis) k_.daxpy(-k_.dot(b.data(), w.data(), n_), b.data(), w.data(), n_);
  }

  void project_locked(Vec& w) const {
    for (const auto& l : locked_) k_.daxpy(-k_.dot(l.x.data(), w.data(), n_), l.x.data(), w.data(), n_);
  }

  double norm(const Vec& w) const { return std::sqrt(k_.dot(w.data(), w.data(), n_)); }

  // Random unit vector orthogonal to `basis` and the locked set, or empty.
  Vec fresh(const std::vector<Vec>& basis) {
    std::normal_distribution<double> nd;
    for (int attempt = 0; attempt < 5; ++attempt) {
      Vec v(n_);
      for (auto& x : v) x = nd(rng_);
      for (int rep = 0; rep < 2; ++rep) {
        project_locked(v);
        project_out(v, basis);
      }
      const double nv = norm(v);
      if (nv > 1e-8 * std::sqrt(static_cast<double>(n_))) {
        for (auto& x : v) x /= nv;
        return v;
      }
    }
    return {};
  }

  std::vector<double> lanczos_pass(double& sigma) {
    std::vector<double> estimates;
    const std::size_t avail = n_ - locked_.size();
    if (avail == 0) return estimates;
    const std::size_t need = req_.k > locked_.size() ? req_.k - locked_.size() : 1;
    const std::size_t m = std::min(avail, std::max<std::size_t>(2 * need + 20, 40));
    auto F = factor(sigma);

    std::vector<Vec> V;
    std::vector<double> alpha, beta;
    Vec v = fresh(V);
    if (v.empty()) return estimates;
    Vec w(n_);
    for (std::size_t j = 0; j < m; ++j) {
      V.push_back(v);
      w = v;
      F->solve(w);
      ++steps_;
      const double a = k_.dot(w.data(), v.data(), n_);
      k_.daxpy(-a, v.data(), w.data(), n_);
      if (j > 0) k_.daxpy(-beta.back(), V[j - 1].data(), w.data(), n_);
      for (int rep = 0; rep < 2; ++rep) {
        project_locked(w);
        project_out(w, V);
      }
      alpha.push_back(a);
      if (j + 1 == m) break;
      const double b = norm(w);
      if (b <= 1e-12 * std::max(std::abs(a), 1e-300)) {
        // invariant subspace: restart the recurrence in the complement
        v = fresh(V);
        if (v.empty()) break;
        beta.push_back(0.0);
      } else {
        beta.push_back(b);
        for (std::size_t i = 0; i < n_; ++i) v[i] = w[i] / b;
      }
    }

    const auto mm = static_cast<Eigen::Index>(alpha.size());
    Eigen::VectorXd d = Eigen::Map<Eigen::VectorXd>(alpha.data(), mm);
    Eigen::VectorXd e = mm > 1 ? Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(beta.data(), mm - 1)) : Eigen::VectorXd();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    tri.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
    const Eigen::VectorXd& theta = tri.eigenvalues();
    const Eigen::MatrixXd& Y = tri.eigenvectors();

    // Ritz values nearest the shift (largest |theta|) first.
    std::vector<Eigen::Index> order(static_cast<std::size_t>(mm));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return std::abs(theta[a]) > std::abs(theta[b]); });
    const std::size_t check = std::min<std::size_t>(order.size(), need + 12);
    Vec x(n_), ax(n_);
    for (std::size_t c = 0; c < order.size(); ++c) {
      const auto idx = order[c];
      if (std::abs(theta[idx]) < 1e-300) continue;
      const double lam_est = sigma + 1.0 / theta[idx];
      if (c >= check) {
        estimates.push_back(lam_est);
        continue;
      }
      std::fill(x.begin(), x.end(), 0.0);
      for (Eigen::Index j = 0; j < mm; ++j) k_.daxpy(Y(j, idx), V[static_cast<std::size_t>(j)].data(), x.data(), n_);
      for (int rep = 0; rep < 2; ++rep) project_locked(x);
      const double nx = norm(x);
      if (nx < 0.5) {
        estimates.push_back(lam_est);
        continue;
      }
      for (auto& xi : x) xi /= nx;
      op_.apply(x, ax);
      const double lam = k_.dot(x.data(), ax.data(), n_);
      k_.daxpy(-lam, x.data(), ax.data(), n_);
      const double res = norm(ax);
      if (res <= res_tol_) {
        locked_.push_back({lam, res, x});
      } else {
        estimates.push_back(lam_est);
      }
    }
    return estimates;
  }

  SpectrumResult finish() {
    SpectrumResult out;
    for (std::size_t i = 0; i < req_.k; ++i) {
      out.eigenvalues.push_back(locked_[i].lambda);
      out.residuals.push_back(locked_[i].residual);
      if (req_.want_vectors) out.vectors.push_back(locked_[i].x);
      if (locked_[i].lambda < 0) ++out.negative_count;
    }
    out.iterations = steps_;
    out.factorizations = facts_;
    return out;
  }

  const SymmetricOperator& op_;
  EigenRequest req_;
  std::size_t n_;
  const simd::KernelTable& k_;
  std::mt19937_64 rng_;
  double lo_ = 0, hi_ = 0, scale_ = 1, gap_ = 0, res_tol_ = 0;
  std::vector<Locked> locked_;
  std::size_t steps_ = 0, facts_ = 0;
};

void validate(const SymmetricOperator& op, const EigenRequest& req) {
  if (!(req.tol > 0.0)) throw ValidationError("eig_tol", "tolerance must be positive");
  if (req.k > op.dim())
    throw ValidationError("eig_k", "requested " + std::to_string(req.k) + " eigenpairs of a " +
                                       std::to_string(op.dim()) + "-dimensional operator");
}

}  // namespace

SpectrumResult eigs_smallest(const SymmetricOperator& op, const EigenRequest& req) {
  validate(op, req);
  if (req.k == 0) return {};
  const double defect = symmetry_defect(op, req.seed ^ 0x5bd1e995ULL);
  if (defect > 1e-10) throw ValidationError("operator_asymmetric", "operator fails the symmetry probe (defect " +
                                                                        std::to_string(defect) + ")");
  ShiftInvertLanczos solver(op, req);
  return solver.run();
}

SpectrumResult eigs_below(const SymmetricOperator& op, double upper, const EigenRequest& req) {
  if (!(req.tol > 0.0)) throw ValidationError("eig_tol", "tolerance must be positive");
  const std::size_t available = count_below(op, upper);
  EigenRequest sub = req;
  sub.k = std::min(available, req.k);
  SpectrumResult out = eigs_smallest(op, sub);
  out.truncated = available > req.k;
  out.negative_count = upper == 0.0 ? available : count_below(op, 0.0);
  out.factorizations += upper == 0.0 ? 1 : 2;
  return out;
}

}  // namespace contactlab
