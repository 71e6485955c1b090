#include <algorithm>

#include "fracspec/simd/kernels.hpp"

namespace fracspec::simd {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void dot2_scalar(const double* w, const double* x, const double* y, std::size_t n, double* out_x,
                 double* out_y) {
  double sx = 0.0;
  double sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  *out_x = sx;
  *out_y = sy;
}

void cdot_scalar(const double* w_re, const double* w_im, const double* x_re, const double* x_im,
                 std::size_t n, double* out_re, double* out_im) {
  double sr = 0.0;
  double si = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sr += w_re[i] * x_re[i] - w_im[i] * x_im[i];
    si += w_re[i] * x_im[i] + w_im[i] * x_re[i];
  }
  *out_re = sr;
  *out_im = si;
}

double weighted_norm2_scalar(const double* w, const double* re, const double* im, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * (re[i] * re[i] + im[i] * im[i]);
  return s;
}

double max_abs2_scalar(const double* re, const double* im, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, re[i] * re[i] + im[i] * im[i]);
  return m;
}

constexpr KernelTable kScalar{
    "scalar", dot_scalar, dot2_scalar, cdot_scalar, weighted_norm2_scalar, max_abs2_scalar,
};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace fracspec::simd
