#include "henon/simd/kernels.hpp"

#include <cmath>

namespace henon::simd {
namespace {

double dot3(const double* a, const double* b, const double* w, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += a[k] * b[k] * w[k];
  return s;
}

double abs_pow_sum(const double* u, const double* coef, double p, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (u[k] != 0.0) s += coef[k] * std::pow(std::fabs(u[k]), p);
  }
  return s;
}

void signed_pow(const double* u, const double* coef, double q, double* out, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = u[k] == 0.0 ? 0.0 : coef[k] * std::pow(std::fabs(u[k]), q) * u[k];
  }
}

void abs_pow(const double* u, const double* coef, double q, double* out, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = u[k] == 0.0 ? 0.0 : coef[k] * std::pow(std::fabs(u[k]), q);
  }
}

double face_form(const double* a, const double* b, const double* coef, std::size_t s,
                 std::size_t n) {
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) acc += coef[k] * (a[k + s] - a[k]) * (b[k + s] - b[k]);
  return acc;
}

void face_apply(const double* u, const double* coef, std::size_t s, std::size_t n, double* out) {
  for (std::size_t k = 0; k < n; ++k) out[k] += coef[k] * (u[k] - u[k + s]);
  for (std::size_t k = 0; k < n; ++k) out[k + s] += coef[k] * (u[k + s] - u[k]);
}

void tridiag_solve(const double* lower, const double* inv_diag, double* x, std::size_t rows,
                   std::size_t cols) {
  // forward: y_i = b_i - l_i y_{i-1}
  for (std::size_t i = 1; i < rows; ++i) {
    const double* l = lower + i * cols;
    const double* prev = x + (i - 1) * cols;
    double* cur = x + i * cols;
    for (std::size_t c = 0; c < cols; ++c) cur[c] -= l[c] * prev[c];
  }
  // back: x_i = y_i / d_i - l_{i+1} x_{i+1}
  {
    double* last = x + (rows - 1) * cols;
    const double* d = inv_diag + (rows - 1) * cols;
    for (std::size_t c = 0; c < cols; ++c) last[c] *= d[c];
  }
  for (std::size_t i = rows - 1; i-- > 0;) {
    const double* l = lower + (i + 1) * cols;
    const double* d = inv_diag + i * cols;
    const double* next = x + (i + 1) * cols;
    double* cur = x + i * cols;
    for (std::size_t c = 0; c < cols; ++c) cur[c] = cur[c] * d[c] - l[c] * next[c];
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar",  dot3,       abs_pow_sum, signed_pow,
                                 abs_pow,   face_form,  face_apply,  tridiag_solve};
  return table;
}

}  // namespace henon::simd
