// Built with -mavx2 only (no FMA) so elementwise results match the scalar path bit for bit.
#include <immintrin.h>

#include "contactlab/simd/kernels.hpp"

namespace contactlab::simd {
namespace {

inline double* raw(cplx* p) { return reinterpret_cast<double*>(p); }
inline const double* raw(const cplx* p) { return reinterpret_cast<const double*>(p); }

inline double hsum(__m256d v) {
  alignas(32) double t[4];
  _mm256_store_pd(t, v);
  return (t[0] + t[1]) + (t[2] + t[3]);
}

void mul_real(cplx* x, const double* m, std::size_t n) {
  double* p = raw(x);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d mm = _mm256_castpd128_pd256(_mm_loadu_pd(m + i));
    mm = _mm256_permute4x64_pd(mm, 0x50);  // m0 m0 m1 m1
    _mm256_storeu_pd(p + 2 * i, _mm256_mul_pd(_mm256_loadu_pd(p + 2 * i), mm));
  }
  for (; i < n; ++i) {
    p[2 * i] *= m[i];
    p[2 * i + 1] *= m[i];
  }
}

void mul_cplx(cplx* x, const cplx* m, std::size_t n) {
  double* p = raw(x);
  const double* q = raw(m);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d v = _mm256_loadu_pd(p + 2 * i);
    const __m256d w = _mm256_loadu_pd(q + 2 * i);
    const __m256d re = _mm256_movedup_pd(w);        // c c
    const __m256d im = _mm256_permute_pd(w, 0xF);   // d d
    const __m256d sw = _mm256_permute_pd(v, 0x5);   // b a
    _mm256_storeu_pd(p + 2 * i, _mm256_addsub_pd(_mm256_mul_pd(v, re), _mm256_mul_pd(sw, im)));
  }
  for (; i < n; ++i) {
    const double a = p[2 * i], b = p[2 * i + 1];
    const double c = q[2 * i], d = q[2 * i + 1];
    p[2 * i] = a * c - b * d;
    p[2 * i + 1] = a * d + b * c;
  }
}

void abs2(const cplx* x, double* out, std::size_t n) {
  const double* p = raw(x);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(p + 2 * i);
    const __m256d b = _mm256_loadu_pd(p + 2 * i + 4);
    const __m256d h = _mm256_hadd_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b));
    _mm256_storeu_pd(out + i, _mm256_permute4x64_pd(h, 0xD8));
  }
  for (; i < n; ++i) out[i] = p[2 * i] * p[2 * i] + p[2 * i + 1] * p[2 * i + 1];
}

double sumsq(const double* p, std::size_t len) {
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= len; i += 8) {
    const __m256d a = _mm256_loadu_pd(p + i);
    const __m256d b = _mm256_loadu_pd(p + i + 4);
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(a, a));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(b, b));
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < len; ++i) s += p[i] * p[i];
  return s;
}

double norm2(const cplx* x, std::size_t n) { return sumsq(raw(x), 2 * n); }

double wnorm2(const cplx* x, const double* w, std::size_t n) {
  const double* p = raw(x);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(p + 2 * i);
    const __m256d b = _mm256_loadu_pd(p + 2 * i + 4);
    __m256d h = _mm256_hadd_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b));
    h = _mm256_permute4x64_pd(h, 0xD8);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(w + i), h));
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += w[i] * (p[2 * i] * p[2 * i] + p[2 * i + 1] * p[2 * i + 1]);
  return s;
}

double dot_raw(const double* a, const double* b, std::size_t len) {
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= len; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4)));
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < len; ++i) s += a[i] * b[i];
  return s;
}

double re_dot(const cplx* a, const cplx* b, std::size_t n) { return dot_raw(raw(a), raw(b), 2 * n); }

double dot(const double* a, const double* b, std::size_t n) { return dot_raw(a, b, n); }

void axpby(double alpha, const cplx* x, double beta, cplx* y, std::size_t n) {
  const double* p = raw(x);
  double* q = raw(y);
  const std::size_t len = 2 * n;
  const __m256d va = _mm256_set1_pd(alpha), vb = _mm256_set1_pd(beta);
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    const __m256d r = _mm256_add_pd(_mm256_mul_pd(va, _mm256_loadu_pd(p + i)),
                                    _mm256_mul_pd(vb, _mm256_loadu_pd(q + i)));
    _mm256_storeu_pd(q + i, r);
  }
  for (; i < len; ++i) q[i] = alpha * p[i] + beta * q[i];
}

void daxpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_mul_pd(va, _mm256_loadu_pd(x + i))));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace

const KernelTable* avx2_kernels() {
  static const KernelTable table{Backend::avx2, mul_real, mul_cplx, abs2, norm2, wnorm2,
                                 re_dot,        axpby,    dot,      daxpy};
  return &table;
}

}  // namespace contactlab::simd
