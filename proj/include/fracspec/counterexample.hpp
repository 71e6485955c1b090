#pragma once

// Hardy-Littlewood initial datum on T^1,
//   Phi(x) = sum_{n>=1} e^{i n ln n} / n e^{i n x},   phi = Re Phi,
// whose coefficients phi_{+-n} have modulus 1 / (2n): phi is Hoelder-1/2 and in
// L_2^{1/2}, yet sum |phi_n| diverges and so does the twice-differentiated
// solution series
//   U(k) = sum_{k0 <= |n| <= k} |phi_n| |n|^2 E_{rho,1}(-|n|^2 t^rho)
//        ~ ln k / (Gamma(1 - rho) t^rho).

#include <cstdint>
#include <span>
#include <vector>

#include "fracspec/spectra.hpp"

namespace fracspec {

struct HLDatum {
  std::int64_t k_max = 0;
  /// phi_n = e^{i n ln n} / (2n), phi_{-n} = conj(phi_n), 1 <= n <= k_max.
  SpectralField coefficients;
};

/// Phases n ln n are reduced modulo 2 pi in double-double. k_max >= 2.
HLDatum hl_coefficients(std::int64_t k_max);

/// sum_{1 <= |n| <= k} |phi_n| for each checkpoint k <= k_max.
std::vector<double> abs_coeff_partial_sums(const HLDatum& datum,
                                           std::span<const std::int64_t> checkpoints);

struct GrowthFit {
  double rho = 0.0;
  double t = 0.0;
  std::int64_t k0 = 0;
  std::vector<std::int64_t> k;
  std::vector<double> U;
  /// Least-squares U ~ slope ln k + intercept over the checkpoints.
  double fitted_slope = 0.0;
  double intercept = 0.0;
  /// 1 / (Gamma(1 - rho) t^rho).
  double predicted_slope = 0.0;
  double relative_slope_error = 0.0;
};

/// U(k) from mlf_neg at every mode. rho in (0, 1), t > 0, k0^2 t^rho >= 50,
/// checkpoints sorted within [k0, k_max] with at least two distinct values.
GrowthFit divergence_sum(const HLDatum& datum, double rho, double t, std::int64_t k0,
                         std::span<const std::int64_t> checkpoints);

/// max over grid pairs at strides 1, 2, 4, ... < M / 2 of |g(x) - g(y)| / |x - y|^exponent
/// on the synthesized field. exponent in (0, 1]; grid_M odd and alias-free.
double holder_constant(const SpectralField& field, std::size_t grid_M, double exponent);
double holder_constant(const HLDatum& datum, std::size_t grid_M, double exponent);

/// Boundary between stabilizing and growing Liouville partial sums over a_grid
/// (ascending), bisected to 1e-6. +inf when every tested a stabilizes;
/// InconclusiveError when none does or the pattern brackets no transition.
double critical_exponent(const SpectralField& field, std::span<const double> a_grid,
                         std::span<const std::int64_t> checkpoints);

}  // namespace fracspec
