#pragma once

// Two-parameter Mittag-Leffler function on the negative real axis,
//   E_{rho,mu}(-t) = sum_k (-t)^k / Gamma(rho k + mu),
// together with the relaxation kernel xi^{rho-1} E_{rho,rho}(-lambda xi^rho)
// and its exact antiderivative.

#include <memory>
#include <span>

namespace fracspec {

struct MlfParams {
  double rho = 0.5;
  double mu = 1.0;
};

/// integral is the last-resort positive-integrand quadrature available for
/// 0 < rho < 1 and mu in {1, rho}.
enum class MlfBranch { series, asymptotic, extended_precision, integral };

const char* to_string(MlfBranch b);

struct EvalReport {
  double value = 0.0;
  double est_rel_error = 0.0;
  MlfBranch branch = MlfBranch::series;
};

/// Evaluator for one (rho, mu). Coefficient tables are built on construction
/// (double-double ones on first use) and shared between copies; evaluation is
/// const and thread-safe. Admits 0 < rho <= 2 and mu > 0.
class MittagLeffler {
 public:
  MittagLeffler(double rho, double mu);

  /// E_{rho,mu}(-t), t >= 0. Throws AccuracyError when no branch certifies
  /// a relative error of 1e-10.
  [[nodiscard]] EvalReport eval_neg(double t) const;

  [[nodiscard]] double operator()(double t) const { return eval_neg(t).value; }

  [[nodiscard]] double rho() const { return rho_; }
  [[nodiscard]] double mu() const { return mu_; }

  struct Tables;

 private:
  double rho_;
  double mu_;
  std::shared_ptr<const Tables> tables_;
};

/// E_{rho,mu}(-t) through a process-wide evaluator cache.
/// rho in (0, 2] is accepted so that E_{2,1} identities can be exercised;
/// the solver layers restrict rho to (0, 1].
EvalReport mlf_neg(const MlfParams& params, double t);

/// xi^{rho-1} E_{rho,rho}(-lambda xi^rho) for xi > 0; strictly positive.
double mlf_kernel(double rho, double lambda, double xi);

/// Integral of mlf_kernel over [a, b], 0 <= a <= b, in closed form.
double mlf_kernel_primitive(double rho, double lambda, double a, double b);

/// Leading large-s term 1 / (Gamma(1 - rho) s) of E_{rho,1}(-s); rho in (0, 1).
double mlf_asymptotic_leading(double rho, double s);

/// max over samples of (1 + t) |E_{rho,mu}(-t)|.
double check_decay_bound(const MlfParams& params, std::span<const double> t_samples);

/// max over lambda, t of  t^{rho-1} E_{rho,rho}(-lambda t^rho) / (lambda^{eps-1} t^{eps rho - 1}),
/// i.e. the smallest C in the kernel bound with exponent eps in (0, 1).
double kernel_bound_constant(double rho, double eps, std::span<const double> lambdas,
                             std::span<const double> t_samples);

}  // namespace fracspec
