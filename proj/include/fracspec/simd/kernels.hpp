#pragma once

// Data-parallel reductions used by the transforms, the L1 differentiator and
// the norm sums. Every kernel exists as a scalar reference and, on x86-64, as
// an AVX2+FMA variant chosen once at runtime. Variants differ only in
// summation order.

#include <cstddef>
#include <string_view>

namespace fracspec::simd {

struct KernelTable {
  const char* name;

  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);

  // out_x = sum_i w[i] * x[i], out_y = sum_i w[i] * y[i]
  void (*dot2)(const double* w, const double* x, const double* y, std::size_t n, double* out_x,
               double* out_y);

  // (out_re + i out_im) = sum_i (w_re[i] + i w_im[i]) * (x_re[i] + i x_im[i])
  void (*cdot)(const double* w_re, const double* w_im, const double* x_re, const double* x_im,
               std::size_t n, double* out_re, double* out_im);

  // sum_i w[i] * (re[i]^2 + im[i]^2)
  double (*weighted_norm2)(const double* w, const double* re, const double* im, std::size_t n);

  // max_i (re[i]^2 + im[i]^2); 0 for n = 0
  double (*max_abs2)(const double* re, const double* im, std::size_t n);
};

/// Portable reference kernels.
const KernelTable& scalar_kernels();

/// AVX2+FMA kernels, or nullptr when not compiled in or not supported by the CPU.
const KernelTable* avx2_kernels();

/// The table selected for this process. FRACSPEC_ISA=scalar|avx2 overrides
/// auto-detection; avx2 on a host without it, or any other value, auto-detects.
const KernelTable& active();

/// Selection logic behind active(), exposed for tests.
const KernelTable& select(std::string_view requested);

}  // namespace fracspec::simd
