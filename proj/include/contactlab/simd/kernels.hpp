#pragma once

#include <complex>
#include <cstddef>
#include <string_view>

namespace contactlab::simd {

using cplx = std::complex<double>;

enum class Backend { scalar, avx2 };

// Inner loops of the field and Lanczos code. Elementwise kernels are bitwise
// identical across backends; reductions agree to rounding (different
// association order) but each backend is deterministic on its own.
struct KernelTable {
  Backend backend;
  // x[i] *= m[i]
  void (*mul_real)(cplx* x, const double* m, std::size_t n);
  // x[i] *= m[i]
  void (*mul_cplx)(cplx* x, const cplx* m, std::size_t n);
  // out[i] = |x[i]|^2
  void (*abs2)(const cplx* x, double* out, std::size_t n);
  // sum |x[i]|^2
  double (*norm2)(const cplx* x, std::size_t n);
  // sum w[i] |x[i]|^2
  double (*wnorm2)(const cplx* x, const double* w, std::size_t n);
  // Re sum conj(a[i]) b[i]
  double (*re_dot)(const cplx* a, const cplx* b, std::size_t n);
  // y[i] = alpha x[i] + beta y[i]
  void (*axpby)(double alpha, const cplx* x, double beta, cplx* y, std::size_t n);
  // sum a[i] b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y[i] += alpha x[i]
  void (*daxpy)(double alpha, const double* x, double* y, std::size_t n);
};

const KernelTable& scalar_kernels();
// Null when the binary was built without the AVX2 translation unit.
const KernelTable* avx2_kernels();
bool cpu_has_avx2();

// Chosen once: CONTACTLAB_SIMD=scalar|avx2 overrides, else the best the CPU runs.
const KernelTable& kernels();
std::string_view backend_name(Backend b);

}  // namespace contactlab::simd
