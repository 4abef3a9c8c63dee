#include "contactlab/simd/kernels.hpp"

namespace contactlab::simd {
namespace {

// Complex values are handled through their double pairs so the arithmetic is
// spelled out exactly as in the vector path.
inline double* raw(cplx* p) { return reinterpret_cast<double*>(p); }
inline const double* raw(const cplx* p) { return reinterpret_cast<const double*>(p); }

void mul_real(cplx* x, const double* m, std::size_t n) {
  double* p = raw(x);
  for (std::size_t i = 0; i < n; ++i) {
    p[2 * i] *= m[i];
    p[2 * i + 1] *= m[i];
  }
}

void mul_cplx(cplx* x, const cplx* m, std::size_t n) {
  double* p = raw(x);
  const double* q = raw(m);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = p[2 * i], b = p[2 * i + 1];
    const double c = q[2 * i], d = q[2 * i + 1];
    p[2 * i] = a * c - b * d;
    p[2 * i + 1] = a * d + b * c;
  }
}

void abs2(const cplx* x, double* out, std::size_t n) {
  const double* p = raw(x);
  for (std::size_t i = 0; i < n; ++i) out[i] = p[2 * i] * p[2 * i] + p[2 * i + 1] * p[2 * i + 1];
}

double norm2(const cplx* x, std::size_t n) {
  const double* p = raw(x);
  double s = 0.0;
  for (std::size_t i = 0; i < 2 * n; ++i) s += p[i] * p[i];
  return s;
}

double wnorm2(const cplx* x, const double* w, std::size_t n) {
  const double* p = raw(x);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * (p[2 * i] * p[2 * i] + p[2 * i + 1] * p[2 * i + 1]);
  return s;
}

double re_dot(const cplx* a, const cplx* b, std::size_t n) {
  const double* p = raw(a);
  const double* q = raw(b);
  double s = 0.0;
  for (std::size_t i = 0; i < 2 * n; ++i) s += p[i] * q[i];
  return s;
}

void axpby(double alpha, const cplx* x, double beta, cplx* y, std::size_t n) {
  const double* p = raw(x);
  double* q = raw(y);
  for (std::size_t i = 0; i < 2 * n; ++i) q[i] = alpha * p[i] + beta * q[i];
}

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void daxpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Backend::scalar, mul_real, mul_cplx, abs2, norm2, wnorm2,
                                 re_dot,          axpby,    dot,      daxpy};
  return table;
}

}  // namespace contactlab::simd
