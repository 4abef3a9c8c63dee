#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "contactlab/contact/model.hpp"
#include "contactlab/error.hpp"
#include "contactlab/parallel.hpp"

namespace contactlab {

namespace {

// Linear least squares in (c, a) for a fixed shift b.
LimitFit fit_fixed_b(const std::vector<double>& x, const std::vector<double>& y, double b) {
  const std::size_t m = x.size();
  double s1 = 0, sf = 0, sff = 0, sy = 0, sfy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double f = 1.0 / ((x[i] + b) * (x[i] + b));
    s1 += 1.0;
    sf += f;
    sff += f * f;
    sy += y[i];
    sfy += f * y[i];
  }
  const double det = s1 * sff - sf * sf;
  const double c = (sff * sy - sf * sfy) / det;
  const double a = (s1 * sfy - sf * sy) / det;
  double rss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = y[i] - c - a / ((x[i] + b) * (x[i] + b));
    rss += r * r;
  }
  return {c, a, b, rss};
}

// Counts negative eigenvalues at coupling C on one level; memoized so every
// probe is recorded for the monotonicity check.
class Level {
 public:
  Level(ContactKind kind, const RadialGrid& g) : op_(ContactModelOperator::build(kind, 0.0, g)) {}
  std::size_t count(double C) {
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = probes_.find(C);
      if (it != probes_.end()) return it->second;
    }
    const std::size_t k = op_.with_coupling(C).factorize(0.0)->negative_count();
    std::lock_guard<std::mutex> lock(mu_);
    probes_[C] = k;
    return k;
  }
  void check_monotone() const {
    std::size_t prev = 0;
    double prev_c = 0.0;
    for (const auto& [c, k] : probes_) {
      if (k < prev) {
        std::ostringstream os;
        os.precision(17);
        os << "nonmonotone_count: negative count drops from " << prev << " at C=" << prev_c << " to " << k
           << " at C=" << c << " on level r_min=" << op_.grid().r_min() << " (under-resolved grid)";
        throw NumericalError(os.str());
      }
      prev = k;
      prev_c = c;
    }
  }
  const RadialGrid& grid() const { return op_.grid(); }

 private:
  ContactModelOperator op_;
  std::map<double, std::size_t> probes_;
  std::mutex mu_;
};

}  // namespace

LimitFit extrapolate_log_model(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3) throw ValidationError("extrapolation_points", "need at least 3 levels");
  const double xmin = *std::min_element(x.begin(), x.end());
  const double lo = -xmin + 0.3, hi = 60.0;
  const int steps = 4000;
  double best_b = lo, best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= steps; ++i) {
    const double b = lo + (hi - lo) * i / steps;
    const double r = fit_fixed_b(x, y, b).rss;
    if (r < best) {
      best = r;
      best_b = b;
    }
  }
  const double db = (hi - lo) / steps;
  const double a = std::max(lo, best_b - db), c = std::min(hi, best_b + db);
  const auto mn = boost::math::tools::brent_find_minima([&](double b) { return fit_fixed_b(x, y, b).rss; }, a, c, 52);
  LimitFit f = fit_fixed_b(x, y, mn.second <= best ? mn.first : best_b);
  return f;
}

CriticalConstants critical_constants(ContactKind kind, const std::vector<RadialGrid>& family,
                                     const CriticalOptions& opt) {
  if (family.size() < 4)
    throw ValidationError("refinement_levels", "need at least 4 refinement levels, got " + std::to_string(family.size()));
  for (std::size_t l = 1; l < family.size(); ++l) {
    const double ratio = family[l - 1].r_min() / family[l].r_min();
    if (std::abs(ratio - 2.0) > 1e-9) throw ValidationError("refinement_ratio", "r_min must halve between levels");
  }
  if (!(opt.probe_tol > 0.0) || !(opt.c_max > 0.0) || !(opt.c2_scan_step > 0.0))
    throw ValidationError("critical_options", "tolerance, ceiling and scan step must be positive");

  const std::size_t L = family.size();
  std::vector<std::unique_ptr<Level>> levels(L);
  parallel_for(L, [&](std::size_t l) { levels[l] = std::make_unique<Level>(kind, family[l]); });

  CriticalConstants out;
  out.c1_levels.resize(L);
  parallel_for(L, [&](std::size_t l) {
    Level& lv = *levels[l];
    double lo = 0.0, hi = opt.c_max;
    if (lv.count(lo) != 0) throw NumericalError("operator has negative eigenvalues at C = 0");
    if (lv.count(hi) == 0) throw NumericalError("no negative eigenvalue below the C ceiling");
    while (hi - lo > opt.probe_tol) {
      const double mid = 0.5 * (lo + hi);
      (lv.count(mid) >= 1 ? hi : lo) = mid;
    }
    out.c1_levels[l] = 0.5 * (lo + hi);
  });

  std::vector<double> x(L);
  for (std::size_t l = 0; l < L; ++l) x[l] = std::log(family[l].r_max() / family[l].r_min());
  const LimitFit full = extrapolate_log_model(x, out.c1_levels);
  out.c1 = full.limit;
  for (std::size_t w = 3; w <= L; ++w)
    for (std::size_t s = 0; s + w <= L; ++s) {
      std::vector<double> xs(x.begin() + s, x.begin() + s + w), ys(out.c1_levels.begin() + s, out.c1_levels.begin() + s + w);
      out.window_limits.push_back(extrapolate_log_model(xs, ys).limit);
    }
  out.limit_lo = *std::min_element(out.window_limits.begin(), out.window_limits.end());
  out.limit_hi = *std::max_element(out.window_limits.begin(), out.window_limits.end());
  for (double v : out.window_limits) out.stability = std::max(out.stability, std::abs(v - out.c1) / out.c1);

  // c2: first C where the count grows strictly at every refinement step.
  auto counts = [&](double C) {
    std::vector<std::size_t> k(L);
    parallel_for(L, [&](std::size_t l) { k[l] = levels[l]->count(C); });
    return k;
  };
  auto diverging = [&](const std::vector<std::size_t>& k) {
    for (std::size_t l = 1; l < L; ++l)
      if (k[l] <= k[l - 1]) return false;
    return true;
  };
  const double start = *std::min_element(out.c1_levels.begin(), out.c1_levels.end());
  double prev = start, hit = -1.0;
  for (double C = start; C <= opt.c_max + 1e-12; C += opt.c2_scan_step) {
    if (diverging(counts(C))) {
      hit = C;
      break;
    }
    prev = C;
  }
  if (hit > 0.0) {
    double lo = prev, hi = hit;
    while (hi - lo > opt.probe_tol) {
      const double mid = 0.5 * (lo + hi);
      (diverging(counts(mid)) ? hi : lo) = mid;
    }
    out.c2 = hi;
    out.c2_found = true;
  } else {
    out.c2 = opt.c_max;
  }
  out.c2_probe = out.c2;
  const auto k = counts(out.c2_probe);
  for (std::size_t l = 0; l < L; ++l) out.refinement_trace.push_back({family[l].r_min(), k[l]});
  for (const auto& lv : levels) lv->check_monotone();
  return out;
}

}  // namespace contactlab
