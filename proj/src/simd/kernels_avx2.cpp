// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include <algorithm>

#include "fracspec/simd/kernels.hpp"

namespace fracspec::simd {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline double hmax(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d m = _mm_max_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_max_sd(m, _mm_unpackhi_pd(m, m)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void dot2_avx2(const double* w, const double* x, const double* y, std::size_t n, double* out_x,
               double* out_y) {
  __m256d ax = _mm256_setzero_pd();
  __m256d ay = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d wv = _mm256_loadu_pd(w + i);
    ax = _mm256_fmadd_pd(wv, _mm256_loadu_pd(x + i), ax);
    ay = _mm256_fmadd_pd(wv, _mm256_loadu_pd(y + i), ay);
  }
  double sx = hsum(ax);
  double sy = hsum(ay);
  for (; i < n; ++i) {
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  *out_x = sx;
  *out_y = sy;
}

void cdot_avx2(const double* w_re, const double* w_im, const double* x_re, const double* x_im,
               std::size_t n, double* out_re, double* out_im) {
  __m256d rr = _mm256_setzero_pd();
  __m256d ii = _mm256_setzero_pd();
  __m256d ri = _mm256_setzero_pd();
  __m256d ir = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d wr = _mm256_loadu_pd(w_re + i);
    const __m256d wi = _mm256_loadu_pd(w_im + i);
    const __m256d xr = _mm256_loadu_pd(x_re + i);
    const __m256d xi = _mm256_loadu_pd(x_im + i);
    rr = _mm256_fmadd_pd(wr, xr, rr);
    ii = _mm256_fmadd_pd(wi, xi, ii);
    ri = _mm256_fmadd_pd(wr, xi, ri);
    ir = _mm256_fmadd_pd(wi, xr, ir);
  }
  double sr = hsum(_mm256_sub_pd(rr, ii));
  double si = hsum(_mm256_add_pd(ri, ir));
  for (; i < n; ++i) {
    sr += w_re[i] * x_re[i] - w_im[i] * x_im[i];
    si += w_re[i] * x_im[i] + w_im[i] * x_re[i];
  }
  *out_re = sr;
  *out_im = si;
}

double weighted_norm2_avx2(const double* w, const double* re, const double* im, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_loadu_pd(re + i);
    const __m256d m = _mm256_loadu_pd(im + i);
    const __m256d a2 = _mm256_fmadd_pd(r, r, _mm256_mul_pd(m, m));
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), a2, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += w[i] * (re[i] * re[i] + im[i] * im[i]);
  return s;
}

double max_abs2_avx2(const double* re, const double* im, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_loadu_pd(re + i);
    const __m256d m = _mm256_loadu_pd(im + i);
    acc = _mm256_max_pd(acc, _mm256_add_pd(_mm256_mul_pd(r, r), _mm256_mul_pd(m, m)));
  }
  double s = hmax(acc);
  for (; i < n; ++i) s = std::max(s, re[i] * re[i] + im[i] * im[i]);
  return s;
}

}  // namespace

extern const KernelTable kAvx2Kernels;
const KernelTable kAvx2Kernels{
    "avx2", dot_avx2, dot2_avx2, cdot_avx2, weighted_norm2_avx2, max_abs2_avx2,
};

}  // namespace fracspec::simd
