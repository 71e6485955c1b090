#pragma once

// Scalar fractional Cauchy problem for one Fourier mode,
//   D_t^rho w + lambda w = f(t),  w(0) = phi,
// solved by w(t) = phi E_{rho,1}(-lambda t^rho) + int_0^t f(t - xi) K(xi) dxi
// with K(xi) = xi^{rho-1} E_{rho,rho}(-lambda xi^rho), plus the uniform-mesh
// differentiators used to check the equation a posteriori.

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace fracspec {

using Complex = std::complex<double>;

/// Real-valued time profile on [0, T]. Copies share their data; evaluation is
/// const and reentrant.
class TimeProfile {
 public:
  enum class Kind { constant, polynomial, cosine, exponential, sampled };

  /// f(t) = c.
  static TimeProfile constant(double c);
  /// f(t) = sum_k coeffs[k] t^k.
  static TimeProfile polynomial(std::vector<double> coeffs);
  /// f(t) = cos(omega t + phase).
  static TimeProfile cosine(double omega, double phase = 0.0);
  /// f(t) = exp(rate t).
  static TimeProfile exponential(double rate);
  /// Piecewise-linear interpolant of (nodes, values); nodes strictly increasing,
  /// at least two of them. Evaluation outside [nodes.front(), nodes.back()]
  /// raises DomainError.
  static TimeProfile sampled(std::vector<double> nodes, std::vector<double> values);

  TimeProfile();  // constant 0

  [[nodiscard]] double operator()(double t) const;
  [[nodiscard]] Kind kind() const;
  /// True when the profile is identically zero.
  [[nodiscard]] bool is_zero() const;
  /// max |f| over 1025 equispaced samples of [0, T] plus the sampled nodes inside it.
  [[nodiscard]] double sup_abs(double T) const;

  // Parameters, meaningful for the matching kind only.
  [[nodiscard]] double constant_value() const;
  [[nodiscard]] double omega() const;
  [[nodiscard]] double phase() const;
  [[nodiscard]] double rate() const;
  [[nodiscard]] const std::vector<double>& coefficients() const;
  [[nodiscard]] const std::vector<double>& nodes() const;
  [[nodiscard]] const std::vector<double>& values() const;

  struct Data;

 private:
  explicit TimeProfile(std::shared_ptr<const Data> d) : data_(std::move(d)) {}
  std::shared_ptr<const Data> data_;
};

/// f_n(t) = sum_i weight_i q_i(t).
class ModeForcing {
 public:
  struct Term {
    Complex weight;
    TimeProfile profile;
  };

  ModeForcing() = default;
  ModeForcing(const TimeProfile& p) : terms_{{Complex(1.0), p}} {}  // NOLINT(implicit)
  explicit ModeForcing(std::vector<Term> terms) : terms_(std::move(terms)) {}

  void add(Complex weight, const TimeProfile& p) { terms_.push_back({weight, p}); }
  [[nodiscard]] Complex operator()(double t) const;
  /// True when every term has zero weight or a zero profile.
  [[nodiscard]] bool is_zero() const;
  [[nodiscard]] const std::vector<Term>& terms() const { return terms_; }

 private:
  std::vector<Term> terms_;
};

/// Nodes xi_j = T (j / M)^r, j = 0..M.
struct GradedMesh {
  double T = 1.0;
  std::size_t M = 64;
  double r = 1.0;

  /// r = 2 / rho clipped to [1, 4].
  static GradedMesh for_order(double rho, double T, std::size_t M);
  /// DomainError unless T > 0, M >= 1 and r >= 1.
  void validate() const;
  [[nodiscard]] double node(std::size_t j) const;
  [[nodiscard]] std::vector<double> nodes() const;
};

struct ModalOptions {
  /// Absolute mesh-doubling tolerance relative to max(1, max |w|);
  /// 0 selects 1e-8 for rho = 1 and 1e-6 otherwise.
  double tolerance = 0.0;
  /// Doublings of the starting mesh before ConvergenceError.
  int max_doublings = 10;
};

struct ModeSolution {
  double lambda = 0.0;
  Complex phi_n;
  std::vector<double> times;
  std::vector<Complex> values;
  /// max over times of |w_M - w_{M/2}| at the final mesh M.
  double quadrature_error_est = 0.0;
  /// Subintervals of the final convolution mesh (0 when no forcing).
  std::size_t mesh_M = 0;
};

/// w_n at each requested time. times sorted, within [0, mesh.T]; rho in (0, 1].
/// One mesh size serves every time so that the error is smooth in t.
ModeSolution solve_mode(double rho, double lambda, Complex phi_n, const ModeForcing& f_n,
                        std::span<const double> times, const GradedMesh& mesh,
                        const ModalOptions& options = {});

/// Product-integration value of int_0^t f(t - xi) K(xi) dxi on mesh scaled to
/// [0, t], f frozen at subinterval midpoints, K integrated exactly. t in (0, mesh.T].
Complex convolve_kernel(double rho, double lambda, const ModeForcing& f_n, double t,
                        const GradedMesh& mesh);

/// L1 Caputo derivative on t_j = j dt; out[0] = 0 (empty sum). rho in (0, 1).
std::vector<double> caputo_l1(std::span<const double> h, double dt, double rho);
std::vector<Complex> caputo_l1(std::span<const Complex> h, double dt, double rho);

/// Riemann-Liouville derivative at t_1..t_{n-1}: L1 Caputo plus h(0) t^{-rho} / Gamma(1 - rho).
std::vector<double> riemann_liouville_l1(std::span<const double> h, double dt, double rho);
/// The same at the single node t_m; DomainError at m = 0.
double riemann_liouville_l1_at(std::span<const double> h, double dt, double rho, std::size_t m);

/// L1 Caputo for rho < 1; for rho = 1 the ordinary derivative by BDF2
/// (first-order difference at t_1). out[0] = 0.
std::vector<Complex> time_derivative_uniform(std::span<const Complex> h, double dt, double rho);

struct CauchyReport {
  double dt = 0.0;
  /// max |D w + lambda w - f| over t_m in [0.05 T, T] at dt and at dt / 2.
  double sup_residual = 0.0;
  double sup_residual_half = 0.0;
  /// log2(sup_residual / sup_residual_half); +inf when both vanish.
  double observed_rate = 0.0;
  /// max over 0 < t_m < 0.05 T at dt / 2.
  double initial_layer_residual = 0.0;
  /// |w(0) - phi|.
  double initial_error = 0.0;
  double quadrature_error_est = 0.0;
};

/// Residual of the mode equation at dt and dt / 2 on [0, T]. T / dt must be an
/// integer. ConvergenceError when the residual does not decrease under halving.
CauchyReport verify_cauchy(double rho, double lambda, Complex phi_n, const ModeForcing& f_n,
                           double dt, double T, const ModalOptions& options = {});

/// Uniform times j T / steps, j = 0..steps.
std::vector<double> uniform_times(double T, std::size_t steps);

}  // namespace fracspec
