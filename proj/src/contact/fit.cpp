#include <algorithm>
#include <cmath>

#include "contactlab/contact/model.hpp"
#include "contactlab/error.hpp"

namespace contactlab {

std::string to_string(FitModel m) {
  switch (m) {
    case FitModel::sqrt_n: return "sqrt_n";
    case FitModel::log_n: return "log_n";
    case FitModel::geometric: return "geometric";
  }
  return "?";
}

FitModel fit_model_from_string(const std::string& s) {
  if (s == "sqrt_n") return FitModel::sqrt_n;
  if (s == "log_n") return FitModel::log_n;
  if (s == "geometric") return FitModel::geometric;
  throw ValidationError("fit_model", "unknown fit model '" + s + "'");
}

namespace {

// One-parameter fit lambda = -p * f(n).
double one_param(const std::vector<double>& lam, const std::vector<double>& f) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < lam.size(); ++i) {
    num -= lam[i] * f[i];
    den += f[i] * f[i];
  }
  if (!(den > 0.0)) throw NumericalError("degenerate fit design");
  return num / den;
}

}  // namespace

FitReport fit_asymptotics(const SpectrumResult& seq, FitModel model) {
  std::vector<double> lam;
  for (double v : seq.eigenvalues)
    if (v <= 0.0 && (model != FitModel::geometric || v < 0.0)) lam.push_back(v);
  std::sort(lam.begin(), lam.end());
  const std::size_t m = lam.size();
  if (m < 4) throw ValidationError("fit_points", "need at least 4 eigenvalues, got " + std::to_string(m));

  FitReport rep{model, {}, 0.0, m};
  std::vector<double> pred(m);
  if (model == FitModel::sqrt_n) {
    std::vector<double> f(m);
    for (std::size_t i = 0; i < m; ++i) f[i] = 1.0 / std::sqrt(static_cast<double>(i + 1));
    const double c = one_param(lam, f);
    rep.params = {c};
    for (std::size_t i = 0; i < m; ++i) pred[i] = -c * f[i];
  } else if (model == FitModel::log_n) {
    std::vector<double> f(m);
    for (std::size_t i = 0; i < m; ++i) f[i] = std::log(static_cast<double>(m - i));
    const double b = one_param(lam, f);
    rep.params = {b};
    for (std::size_t i = 0; i < m; ++i) pred[i] = -b * f[i];
  } else {
    // ln(-lambda) = ln A - kappa n
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const double x = static_cast<double>(i + 1), y = std::log(-lam[i]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double dm = static_cast<double>(m);
    const double kappa = -(dm * sxy - sx * sy) / (dm * sxx - sx * sx);
    const double lnA = (sy + kappa * sx) / dm;
    rep.params = {std::exp(lnA), kappa};
    for (std::size_t i = 0; i < m; ++i) pred[i] = -std::exp(lnA - kappa * static_cast<double>(i + 1));
  }
  double ss = 0.0;
  for (std::size_t i = 0; i < m; ++i) ss += (lam[i] - pred[i]) * (lam[i] - pred[i]);
  rep.rms_residual = std::sqrt(ss / static_cast<double>(m));
  for (double p : rep.params)
    if (!std::isfinite(p)) throw NumericalError("fit produced non-finite parameters");
  return rep;
}

std::vector<FitReport> fit_all(const SpectrumResult& seq) {
  std::vector<FitReport> out;
  for (FitModel m : {FitModel::sqrt_n, FitModel::log_n, FitModel::geometric}) out.push_back(fit_asymptotics(seq, m));
  std::stable_sort(out.begin(), out.end(),
                   [](const FitReport& a, const FitReport& b) { return a.rms_residual < b.rms_residual; });
  return out;
}

}  // namespace contactlab
