#pragma once

// Field solution of D_t^rho u - Laplacian u = f on T^N, u(x, 0) = phi(x),
// assembled mode by mode as
//   u(x, t) = sum_{|n|^2 < k} w_n(t) e^{i n.x},
// with w_n the scalar Cauchy solution for lambda = |n|^2.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fracspec/modal.hpp"
#include "fracspec/spectra.hpp"

namespace fracspec {

/// Spatial data given as coefficients or as grid samples (analyzed on demand).
using FieldData = std::variant<SpectralField, GridField>;

/// One separable source term g(x) q(t).
struct SourceTerm {
  FieldData g;
  TimeProfile q;
};

struct ProblemSpec {
  std::size_t dim = 1;
  double rho = 0.5;
  double T = 1.0;
  FieldData phi = SpectralField(1, 1);
  std::vector<SourceTerm> source;
  /// Claimed Liouville exponent of phi and of every g_i.
  double regularity_exponent_a = 1.0;

  /// DomainError on inconsistent dimensions or parameters out of range.
  void validate() const;
};

/// Outcome of the regularity hypothesis check a > N/2 with stabilizing tails.
struct RegularityCheck {
  double a = 0.0;
  bool exponent_ok = false;
  bool phi_tail_ok = true;
  bool source_tail_ok = true;
  std::vector<std::string> messages;

  [[nodiscard]] bool passed() const { return exponent_ok && phi_tail_ok && source_tail_ok; }
};

/// Tails are tested on stored coefficients at radii R/4, R/2, R of the largest
/// stored |n|; data with R < 8 has no testable tail and passes.
RegularityCheck check_regularity(const ProblemSpec& spec);

struct SolveOptions {
  /// Worker threads for the mode loop; 0 means one.
  std::size_t workers = 1;
  /// Enforce the regularity check with RegularityError instead of a warning.
  bool strict = false;
  /// Starting convolution mesh.
  std::size_t mesh_M = 64;
  /// Grading exponent; 0 selects the rho-dependent default.
  double mesh_r = 0.0;
  ModalOptions modal;
};

class SolutionField {
 public:
  struct Mode {
    MultiIndex index;
    ModeSolution solution;
  };

  SolutionField() = default;
  SolutionField(std::size_t dim, double rho, double T, std::int64_t truncation_radius_sq,
                std::size_t grid_M, std::vector<double> times, std::vector<Mode> modes);

  [[nodiscard]] std::size_t dim() const { return dim_; }
  [[nodiscard]] double rho() const { return rho_; }
  [[nodiscard]] double T() const { return T_; }
  [[nodiscard]] std::int64_t truncation_radius_sq() const { return truncation_; }
  [[nodiscard]] std::size_t grid_M() const { return grid_M_; }
  [[nodiscard]] const std::vector<double>& times() const { return times_; }
  /// Modes with nonzero data, sorted by index; absent modes vanish identically.
  [[nodiscard]] const std::vector<Mode>& modes() const { return modes_; }

  /// Coefficients at times()[i], flagged real_valued when exactly Hermitian.
  [[nodiscard]] SpectralField snapshot(std::size_t time_index) const;
  /// Grid samples at times()[i] on the solve grid, or on points_per_axis if given.
  [[nodiscard]] GridField render(std::size_t time_index, std::size_t points_per_axis = 0) const;
  [[nodiscard]] double max_quadrature_error() const;

  RegularityCheck regularity;
  std::vector<std::string> warnings;

 private:
  std::size_t dim_ = 1;
  double rho_ = 0.5;
  double T_ = 1.0;
  std::int64_t truncation_ = 1;
  std::size_t grid_M_ = 3;
  std::vector<double> times_;
  std::vector<Mode> modes_;
};

/// Solves every mode with |n|^2 < truncation_radius_sq. AliasError unless the
/// truncation is alias-free on grid_M; RegularityError in strict mode when the
/// check fails; ConvergenceError propagates from the mode solver. Results do not
/// depend on the worker count.
SolutionField solve(const ProblemSpec& spec, std::span<const double> times,
                    std::int64_t truncation_radius_sq, std::size_t grid_M,
                    const SolveOptions& options = {});

enum class Termwise { A, caputo };

/// A multiplies each history by |n|^2; caputo applies the uniform-mesh time
/// derivative per mode. MeshError for caputo unless times are j dt from 0.
SolutionField apply_termwise(const SolutionField& sol, Termwise which);

struct ResidualReport {
  double dt = 0.0;
  /// sup over grid points and t_m in [0.05 T, T] of |D_t^rho u + Au - f|.
  double sup_residual = 0.0;
  /// The same sup over 0 < t_m < 0.05 T.
  double initial_layer_residual = 0.0;
  /// sup over the grid of |u(x, 0) - phi_k(x)|, phi_k the truncated datum.
  double initial_error = 0.0;
  std::int64_t truncation_radius_sq = 0;
  /// truncation_tail at a = regularity exponent for t = T and t = T / 2.
  std::vector<double> tail_norm_estimates;
  /// Mode with the largest coefficient residual (empty when all vanish).
  MultiIndex per_mode_worst;
};

/// Residual on the time samples of sol spaced by dt, a positive integer
/// multiple of the solution's uniform spacing; MeshError otherwise.
ResidualReport residual(const SolutionField& sol, const ProblemSpec& spec, double dt);

/// t^{-2 rho} sum_{|n|^2 >= k} |n|^{2a} |phi_n|^2
///   + sum_{|n|^2 >= k} |n|^{2a} (sum_i |g_{i,n}| sup |q_i|)^2 over stored coefficients.
double truncation_tail(const ProblemSpec& spec, double a, std::int64_t truncation_radius_sq,
                       double t);

/// Coefficients of field data: stored entries of a SpectralField, or for a
/// GridField the analysis at the largest alias-free truncation.
SpectralField coefficients_of(const FieldData& d);

}  // namespace fracspec
