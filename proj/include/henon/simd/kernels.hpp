#pragma once

// Data-parallel inner loops shared by every module. Each kernel has a
// portable scalar reference and, on x86-64, an AVX2/FMA variant; the table
// is chosen once at startup (see active_kernels()).
//
// Reductions use a fixed summation order per variant, so results are
// reproducible run to run on the same machine and dispatch choice.

#include <cstddef>
#include <string_view>

namespace henon::simd {

struct KernelTable {
  const char* name;

  /// sum_k a[k] * b[k] * w[k]
  double (*dot3)(const double* a, const double* b, const double* w, std::size_t n);

  /// sum_k coef[k] * |u[k]|^p, p > 0
  double (*abs_pow_sum)(const double* u, const double* coef, double p, std::size_t n);

  /// out[k] = coef[k] * |u[k]|^q * u[k], q > 0 (u = 0 maps to 0)
  void (*signed_pow)(const double* u, const double* coef, double q, double* out, std::size_t n);

  /// out[k] = coef[k] * |u[k]|^q, q > 0
  void (*abs_pow)(const double* u, const double* coef, double q, double* out, std::size_t n);

  /// sum_{k<n} coef[k] * (a[k+s] - a[k]) * (b[k+s] - b[k])
  double (*face_form)(const double* a, const double* b, const double* coef, std::size_t stride,
                      std::size_t n);

  /// out[k] += coef[k]*(u[k]-u[k+s]); out[k+s] += coef[k]*(u[k+s]-u[k]) for k<n
  void (*face_apply)(const double* u, const double* coef, std::size_t stride, std::size_t n,
                     double* out);

  /// In-place batched tridiagonal solve on a row-major rows x cols block: column c
  /// holds an independent system with unit-lower factor `lower` and inverse
  /// pivots `inv_diag`, both laid out like x.
  void (*tridiag_solve)(const double* lower, const double* inv_diag, double* x, std::size_t rows,
                        std::size_t cols);
};

const KernelTable& scalar_kernels();

/// nullptr when the AVX2 variant is not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels();

/// The table used by the library. Defaults to the widest variant the CPU
/// supports; HENON_KERNELS=scalar forces the reference implementation.
const KernelTable& active_kernels();

/// Override the dispatch choice ("scalar", "avx2" or "auto"). Returns false if
/// the requested variant is unavailable.
bool select_kernels(std::string_view which);

}  // namespace henon::simd
