// AVX2/FMA variant of the kernel table. Compiled with -mavx2 -mfma; only
// reached when the CPU reports both features at runtime.

#include "henon/simd/kernels.hpp"

#include <immintrin.h>

#include <cmath>
#include <cstdint>

namespace henon::simd {
namespace {

constexpr double kLn2Hi = 6.93147180369123816490e-01;
constexpr double kLn2Lo = 1.90821492927058770002e-10;
constexpr double kLog2e = 1.44269504088896338700e+00;
constexpr double kSqrt2 = 1.41421356237309514547e+00;

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

// Natural log for finite x > 0 (normal range). log(m) on [sqrt(1/2), sqrt(2))
// uses 2*atanh(s), s = (m-1)/(m+1), |s| <= 0.1716, truncated after s^23.
inline __m256d log_pd(__m256d x) {
  const __m256i bits = _mm256_castpd_si256(x);
  const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
  const __m256i one_bits = _mm256_set1_epi64x(0x3FF0000000000000LL);
  __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, mant_mask), one_bits));
  // biased exponent -> double via the 2^52 magic constant
  const __m256i e_bits = _mm256_srli_epi64(bits, 52);
  const __m256d magic = _mm256_set1_pd(4503599627370496.0);
  __m256d e = _mm256_sub_pd(
      _mm256_castsi256_pd(_mm256_or_si256(e_bits, _mm256_castpd_si256(magic))), magic);
  e = _mm256_sub_pd(e, _mm256_set1_pd(1023.0));

  const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(kSqrt2), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
  e = _mm256_add_pd(e, _mm256_and_pd(big, _mm256_set1_pd(1.0)));

  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d s = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
  const __m256d s2 = _mm256_mul_pd(s, s);
  __m256d poly = _mm256_set1_pd(1.0 / 23.0);
  for (int k = 10; k >= 0; --k) {
    poly = _mm256_fmadd_pd(poly, s2, _mm256_set1_pd(1.0 / (2 * k + 1)));
  }
  const __m256d log_m = _mm256_mul_pd(_mm256_add_pd(s, s), poly);
  // e*ln2_hi is exact for |e| < 2^11
  return _mm256_add_pd(_mm256_mul_pd(e, _mm256_set1_pd(kLn2Hi)),
                       _mm256_fmadd_pd(e, _mm256_set1_pd(kLn2Lo), log_m));
}

// exp(y) for y clamped to [-708, 708], flushed to 0 below; Cody-Waite
// reduction, degree-13 Taylor.
inline __m256d exp_pd(__m256d y) {
  const __m256d under = _mm256_cmp_pd(y, _mm256_set1_pd(-708.0), _CMP_LT_OQ);
  y = _mm256_min_pd(_mm256_max_pd(y, _mm256_set1_pd(-708.0)), _mm256_set1_pd(708.0));
  const __m256d n = _mm256_round_pd(_mm256_mul_pd(y, _mm256_set1_pd(kLog2e)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(kLn2Hi), y);
  r = _mm256_fnmadd_pd(n, _mm256_set1_pd(kLn2Lo), r);

  static constexpr double inv_fact[14] = {
      1.0,
      1.0,
      1.0 / 2.0,
      1.0 / 6.0,
      1.0 / 24.0,
      1.0 / 120.0,
      1.0 / 720.0,
      1.0 / 5040.0,
      1.0 / 40320.0,
      1.0 / 362880.0,
      1.0 / 3628800.0,
      1.0 / 39916800.0,
      1.0 / 479001600.0,
      1.0 / 6227020800.0,
  };
  __m256d p = _mm256_set1_pd(inv_fact[13]);
  for (int k = 12; k >= 0; --k) p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(inv_fact[k]));

  const __m128i n32 = _mm256_cvtpd_epi32(n);
  __m256i n64 = _mm256_cvtepi32_epi64(n32);
  n64 = _mm256_add_epi64(n64, _mm256_set1_epi64x(1023));
  const __m256d scale = _mm256_castsi256_pd(_mm256_slli_epi64(n64, 52));
  return _mm256_andnot_pd(under, _mm256_mul_pd(p, scale));
}

// |x|^p with 0 -> 0; p > 0.
inline __m256d abs_pow_pd(__m256d x, __m256d p) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  const __m256d ax = _mm256_andnot_pd(sign_mask, x);
  // values below the normal range contribute nothing measurable for p > 0
  const __m256d tiny = _mm256_cmp_pd(ax, _mm256_set1_pd(2.2250738585072014e-308), _CMP_LT_OQ);
  const __m256d safe = _mm256_blendv_pd(ax, _mm256_set1_pd(1.0), tiny);
  const __m256d r = exp_pd(_mm256_mul_pd(p, log_pd(safe)));
  return _mm256_andnot_pd(tiny, r);
}

double dot3(const double* a, const double* b, const double* w, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k)),
                           _mm256_loadu_pd(w + k), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(a + k + 4), _mm256_loadu_pd(b + k + 4)),
                           _mm256_loadu_pd(w + k + 4), acc1);
  }
  for (; k + 4 <= n; k += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k)),
                           _mm256_loadu_pd(w + k), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; k < n; ++k) s += a[k] * b[k] * w[k];
  return s;
}

double abs_pow_sum(const double* u, const double* coef, double p, std::size_t n) {
  const __m256d pv = _mm256_set1_pd(p);
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(coef + k), abs_pow_pd(_mm256_loadu_pd(u + k), pv), acc);
  }
  double s = hsum(acc);
  for (; k < n; ++k) {
    if (u[k] != 0.0) s += coef[k] * std::pow(std::fabs(u[k]), p);
  }
  return s;
}

void signed_pow(const double* u, const double* coef, double q, double* out, std::size_t n) {
  const __m256d qv = _mm256_set1_pd(q);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d x = _mm256_loadu_pd(u + k);
    _mm256_storeu_pd(out + k,
                     _mm256_mul_pd(_mm256_mul_pd(_mm256_loadu_pd(coef + k), abs_pow_pd(x, qv)), x));
  }
  for (; k < n; ++k) out[k] = u[k] == 0.0 ? 0.0 : coef[k] * std::pow(std::fabs(u[k]), q) * u[k];
}

void abs_pow(const double* u, const double* coef, double q, double* out, std::size_t n) {
  const __m256d qv = _mm256_set1_pd(q);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    _mm256_storeu_pd(out + k, _mm256_mul_pd(_mm256_loadu_pd(coef + k),
                                            abs_pow_pd(_mm256_loadu_pd(u + k), qv)));
  }
  for (; k < n; ++k) out[k] = u[k] == 0.0 ? 0.0 : coef[k] * std::pow(std::fabs(u[k]), q);
}

double face_form(const double* a, const double* b, const double* coef, std::size_t s,
                 std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d da = _mm256_sub_pd(_mm256_loadu_pd(a + k + s), _mm256_loadu_pd(a + k));
    const __m256d db = _mm256_sub_pd(_mm256_loadu_pd(b + k + s), _mm256_loadu_pd(b + k));
    acc = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(coef + k), da), db, acc);
  }
  double r = hsum(acc);
  for (; k < n; ++k) r += coef[k] * (a[k + s] - a[k]) * (b[k + s] - b[k]);
  return r;
}

void face_apply(const double* u, const double* coef, std::size_t s, std::size_t n, double* out) {
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(u + k), _mm256_loadu_pd(u + k + s));
    _mm256_storeu_pd(out + k, _mm256_fmadd_pd(_mm256_loadu_pd(coef + k), d, _mm256_loadu_pd(out + k)));
  }
  for (; k < n; ++k) out[k] += coef[k] * (u[k] - u[k + s]);
  k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(u + k + s), _mm256_loadu_pd(u + k));
    _mm256_storeu_pd(out + k + s,
                     _mm256_fmadd_pd(_mm256_loadu_pd(coef + k), d, _mm256_loadu_pd(out + k + s)));
  }
  for (; k < n; ++k) out[k + s] += coef[k] * (u[k + s] - u[k]);
}

void tridiag_solve(const double* lower, const double* inv_diag, double* x, std::size_t rows,
                   std::size_t cols) {
  const std::size_t vec_end = cols - cols % 4;
  for (std::size_t i = 1; i < rows; ++i) {
    const double* l = lower + i * cols;
    const double* prev = x + (i - 1) * cols;
    double* cur = x + i * cols;
    std::size_t c = 0;
    for (; c < vec_end; c += 4) {
      _mm256_storeu_pd(cur + c, _mm256_fnmadd_pd(_mm256_loadu_pd(l + c), _mm256_loadu_pd(prev + c),
                                                 _mm256_loadu_pd(cur + c)));
    }
    for (; c < cols; ++c) cur[c] -= l[c] * prev[c];
  }
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
    std::size_t c = 0;
    for (; c < vec_end; c += 4) {
      const __m256d y = _mm256_mul_pd(_mm256_loadu_pd(cur + c), _mm256_loadu_pd(d + c));
      _mm256_storeu_pd(cur + c,
                       _mm256_fnmadd_pd(_mm256_loadu_pd(l + c), _mm256_loadu_pd(next + c), y));
    }
    for (; c < cols; ++c) cur[c] = cur[c] * d[c] - l[c] * next[c];
  }
}

}  // namespace

const KernelTable& avx2_kernel_table() {
  static const KernelTable table{"avx2",  dot3,       abs_pow_sum, signed_pow,
                                 abs_pow, face_form,  face_apply,  tridiag_solve};
  return table;
}

}  // namespace henon::simd
