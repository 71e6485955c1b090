#include "fracspec/mlf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fracspec/errors.hpp"
#include "fracspec/numeric/double_double.hpp"
#include "fracspec/numeric/gamma.hpp"

namespace fracspec {

using numeric::DoubleDouble;

namespace {

constexpr double kUnit = std::numeric_limits<double>::epsilon() / 2;  // 2^-53
constexpr double kUnitDD = 1.2325951644078310e-32;                    // 2^-106
constexpr double kInf = std::numeric_limits<double>::infinity();

// Branch windows in w = t^{1/rho}, the variable that governs both the series
// cancellation (~e^w) and the asymptotic remainder (~e^-w).
constexpr double kSeriesMaxW = 12.0;
constexpr double kExtendedMaxW = 45.0;
constexpr double kAsymptoticMinW = 4.0;
constexpr double kAsymptoticPreferW = 20.0;

constexpr double kTarget = 1e-11;
constexpr double kAccept = 1e-10;

// Neumaier compensated accumulator.
struct CompensatedSum {
  double s = 0.0;
  double c = 0.0;
  void add(double x) {
    const double t = s + x;
    if (std::fabs(s) >= std::fabs(x)) {
      c += (s - t) + x;
    } else {
      c += (x - t) + s;
    }
    s = t;
  }
  [[nodiscard]] double value() const { return s + c; }
};

void validate(double rho, double mu) {
  if (!(rho > 0.0 && rho <= 2.0)) {
    throw DomainError("Mittag-Leffler order rho must lie in (0, 2], got " + std::to_string(rho));
  }
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw DomainError("Mittag-Leffler parameter mu must be positive, got " + std::to_string(mu));
  }
}

}  // namespace

const char* to_string(MlfBranch b) {
  switch (b) {
    case MlfBranch::series:
      return "series";
    case MlfBranch::asymptotic:
      return "asymptotic";
    case MlfBranch::extended_precision:
      return "extended_precision";
    case MlfBranch::integral:
      return "integral";
  }
  return "unknown";
}

struct MittagLeffler::Tables {
  double rho = 0.0;
  double mu = 0.0;

  // L_k = ln Gamma(rho k + mu), k = 0..K-1.
  std::vector<DoubleDouble> log_gamma;
  // 1 / Gamma(rho k + mu) rounded to double.
  std::vector<double> coeff;
  // Gamma(rho (k-1) + mu) / Gamma(rho k + mu) rounded to double; entry 0 unused.
  std::vector<double> ratio;

  // Inverse-power coefficients (-1)^{k+1} / Gamma(mu - rho k), k >= 1 (zero at
  // poles), and the envelope Gamma(rho k + 1 - mu) / pi bounding their magnitude.
  std::vector<double> asym_coeff;
  std::vector<double> asym_env;
  std::vector<double> asym_env_arg;  // rho k + 1 - mu

  // Double-double recurrence data: term_0 = 1/Gamma(mu), r_k = Gamma(rho(k-1)+mu)/Gamma(rho k+mu).
  mutable std::once_flag dd_once;
  mutable DoubleDouble dd_term0;
  mutable std::vector<DoubleDouble> dd_ratio;

  void build_dd() const {
    std::call_once(dd_once, [this] {
      dd_term0 = numeric::exp(-log_gamma[0]);
      dd_ratio.assign(log_gamma.size(), DoubleDouble(0.0));
      for (std::size_t k = 1; k < log_gamma.size(); ++k) {
        dd_ratio[k] = numeric::exp(log_gamma[k - 1] - log_gamma[k]);
      }
    });
  }
};

namespace {

std::shared_ptr<MittagLeffler::Tables> build_tables(double rho, double mu) {
  auto tab = std::make_shared<MittagLeffler::Tables>();
  tab->rho = rho;
  tab->mu = mu;

  // Series tables long enough that the terms at the largest admissible
  // argument fall below 1e-40.
  const double log_t_max = rho * std::log(kExtendedMaxW);
  constexpr std::size_t kSeriesCap = 20000;
  for (std::size_t k = 0; k < kSeriesCap; ++k) {
    const DoubleDouble x = numeric::mul_exact(rho, static_cast<double>(k)) + mu;
    const DoubleDouble lg = numeric::log_gamma(x);
    tab->log_gamma.push_back(lg);
    tab->coeff.push_back(numeric::exp(-lg).to_double());
    tab->ratio.push_back(k == 0 ? 0.0 : std::exp((tab->log_gamma[k - 1] - lg).to_double()));
    if (k >= 4 && lg.hi - static_cast<double>(k) * log_t_max > 92.0) break;
  }

  if (rho <= 1.0) {
    const std::size_t k_asym = static_cast<std::size_t>(std::ceil(60.0 / rho)) + 10;
    tab->asym_coeff.assign(k_asym + 1, 0.0);
    tab->asym_env.assign(k_asym + 1, kInf);
    tab->asym_env_arg.assign(k_asym + 1, 0.0);
    for (std::size_t k = 1; k <= k_asym; ++k) {
      const double kd = static_cast<double>(k);
      const double x = mu - rho * kd;
      const double env_arg = rho * kd + 1.0 - mu;
      const double a = numeric::rgamma(x);
      tab->asym_coeff[k] = (k % 2 == 1) ? a : -a;
      tab->asym_env_arg[k] = env_arg;
      tab->asym_env[k] =
          env_arg > 0.0 ? numeric::gamma(env_arg) / std::numbers::pi : std::fabs(a);
    }
  }
  return tab;
}

struct BranchResult {
  double value = 0.0;
  double est = kInf;  // relative
  MlfBranch branch = MlfBranch::series;
};

double relative(double abs_err, double value) {
  if (abs_err == 0.0) return 0.0;
  if (value == 0.0) return kInf;
  return abs_err / std::fabs(value);
}

BranchResult eval_series_double(const MittagLeffler::Tables& tab, double t) {
  CompensatedSum sum;
  double abs_sum = 0.0;
  DoubleDouble power = 1.0;
  double tail = kInf;
  const std::size_t n = tab.coeff.size();
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) power = power * t;
    const double mag = power.hi * tab.coeff[k];
    const double term = (k % 2 == 0) ? mag : -mag;
    sum.add(term);
    abs_sum += mag;
    if (k + 1 < n) {
      const double q = t * tab.ratio[k + 1];
      const double bound = mag * q / (1.0 - q);
      if (q < 1.0 && bound <= 0x1p-60 * abs_sum) {
        tail = bound;
        break;
      }
    }
  }
  const double value = sum.value();
  const double abs_err = tail + 3.0 * kUnit * abs_sum + kUnit * std::fabs(value);
  return {value, relative(abs_err, value), MlfBranch::series};
}

BranchResult eval_series_dd(const MittagLeffler::Tables& tab, double t) {
  tab.build_dd();
  DoubleDouble sum = 0.0;
  DoubleDouble term = tab.dd_term0;
  double abs_sum = 0.0;
  double weighted = 0.0;  // sum of |term_k| times its relative error level
  double tail = kInf;
  const std::size_t n = tab.dd_ratio.size();
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) term = term * tab.dd_ratio[k] * (-t);
    sum += term;
    const double mag = std::fabs(term.hi);
    abs_sum += mag;
    // The ratio product telescopes to exp(L_0 - L_k): the absolute error of
    // L_0 and L_k plus one rounding per recurrence step.
    const double level = 4.0 * kUnitDD *
                         (std::fabs(tab.log_gamma[0].hi) + std::fabs(tab.log_gamma[k].hi) +
                          3.0 * static_cast<double>(k) + 4.0);
    weighted += mag * level;
    if (k + 1 < n) {
      const double q = t * tab.ratio[k + 1];
      const double bound = mag * q / (1.0 - q);
      if (q < 1.0 && bound <= 1e-36 * abs_sum) {
        tail = bound;
        break;
      }
    }
  }
  const double value = sum.to_double();
  const double abs_err = tail + weighted + kUnit * std::fabs(value);
  return {value, relative(abs_err, value), MlfBranch::extended_precision};
}

BranchResult eval_asymptotic(const MittagLeffler::Tables& tab, double t, double w) {
  const double rho = tab.rho;
  const double exp_part =
      2.0 * std::exp(-w) * std::max(1.0, std::pow(t, (1.0 - tab.mu) / rho)) / rho;
  const double inv_t = 1.0 / t;
  CompensatedSum sum;
  double abs_sum = 0.0;
  double weighted = 0.0;
  double power = 1.0;  // t^{-k}, relative error at most k u
  double prev_env = kInf;
  double last_env = kInf;
  const std::size_t n = tab.asym_coeff.size();
  for (std::size_t k = 1; k < n; ++k) {
    power *= inv_t;
    const double env = tab.asym_env[k] * power;
    const bool monotone_region = tab.asym_env_arg[k] > 1.5;
    if (k > 1 && monotone_region && env > prev_env) break;  // smallest-term truncation
    const double term = tab.asym_coeff[k] * power;
    sum.add(term);
    abs_sum += std::fabs(term);
    weighted += std::fabs(term) * static_cast<double>(k + 16);  // power plus coefficient rounding
    prev_env = env;
    last_env = env;
    // Further terms cannot tighten the estimate below the exponential remainder.
    if (monotone_region && env <= 1e-3 * std::max(exp_part, kUnit * std::fabs(sum.value()))) break;
  }
  const double value = sum.value();
  const double abs_err = last_env + exp_part + kUnit * weighted + kUnit * std::fabs(value);
  return {value, relative(abs_err, value), MlfBranch::asymptotic};
}

// Double-exponential quadrature of a positive integrand over [0, 1] and
// [1, inf), refining by step halving until two levels agree.
template <class F>
std::pair<double, double> de_integral(const F& f) {
  constexpr double kHalfPi = std::numbers::pi / 2;
  constexpr double kSMax = 4.5;
  auto level_sum = [&](double h, bool odd_only) {
    double s = 0.0;
    const std::size_t n = static_cast<std::size_t>(std::ceil(kSMax / h));
    for (std::size_t i = 0; i <= n; ++i) {
      if (odd_only && i % 2 == 0) continue;
      for (const int sign : {1, -1}) {
        if (i == 0 && sign < 0) continue;
        const double sv = sign * static_cast<double>(i) * h;
        const double g = kHalfPi * std::sinh(sv);
        const double dg = kHalfPi * std::cosh(sv);
        // [0, 1]: r = 1 / (1 + e^{-2g})
        const double e2 = std::exp(-2.0 * g);
        const double r01 = 1.0 / (1.0 + e2);
        const double w01 = 2.0 * dg * e2 / ((1.0 + e2) * (1.0 + e2));
        if (r01 > 0.0 && w01 > 0.0) s += w01 * f(r01);
        // [1, inf): r = 1 + e^{g}
        const double eg = std::exp(g);
        if (std::isfinite(eg)) {
          const double w1 = dg * eg;
          const double v = f(1.0 + eg);
          if (v > 0.0) s += w1 * v;
        }
      }
    }
    return s;
  };
  double h = 0.5;
  double raw = level_sum(h, false);
  double prev = raw * h;
  for (int level = 0; level < 9; ++level) {
    raw += level_sum(h / 2, true);
    h /= 2;
    const double cur = raw * h;
    const double diff = std::fabs(cur - prev);
    if (diff <= 1e-13 * cur) return {cur, diff};
    prev = cur;
  }
  return {prev, kInf};
}

BranchResult eval_integral(const MittagLeffler::Tables& tab, double t, double w) {
  const double rho = tab.rho;
  const bool mu_is_one = tab.mu == 1.0;
  const double c = std::cos(std::numbers::pi * rho);
  const double s = numeric::sinpi(rho);
  const double beta = mu_is_one ? rho - 1.0 : rho;
  // r^beta e^{-r w} / (r^{2 rho} + 2 r^rho cos(rho pi) + 1), denominator kept as a sum of squares.
  auto f = [&](double r) {
    const double rr = std::pow(r, rho);
    const double den = (rr + c) * (rr + c) + s * s;
    return std::pow(r, beta) * std::exp(-r * w) / den;
  };
  const auto [integral, diff] = de_integral(f);
  double value = s / std::numbers::pi * integral;
  if (!mu_is_one) value *= w / t;
  const double abs_err = diff * s / std::numbers::pi * (mu_is_one ? 1.0 : w / t) +
                         64.0 * kUnit * std::fabs(value);
  return {value, relative(abs_err, value), MlfBranch::integral};
}

}  // namespace

MittagLeffler::MittagLeffler(double rho, double mu) : rho_(rho), mu_(mu) {
  validate(rho, mu);
  tables_ = build_tables(rho, mu);
}

EvalReport MittagLeffler::eval_neg(double t) const {
  if (!(t >= 0.0) || std::isinf(t)) {
    throw DomainError("E_{rho,mu}(-t) requires finite t >= 0, got " + std::to_string(t));
  }
  if (t == 0.0) return {numeric::rgamma(mu_), 4.0 * kUnit, MlfBranch::series};
  if (rho_ == 1.0 && mu_ == 1.0) {
    const double v = std::exp(-t);
    // Subnormal and underflowed results keep only an absolute resolution.
    const double est = v >= std::numeric_limits<double>::min()
                           ? 2.0 * kUnit
                           : (v > 0.0 ? std::max(2.0 * kUnit, std::numeric_limits<double>::denorm_min() / v) : 1.0);
    return {v, est, MlfBranch::series};
  }

  const double w = std::pow(t, 1.0 / rho_);
  const Tables& tab = *tables_;
  const bool asym_ok = rho_ <= 1.0;

  std::optional<BranchResult> best;
  auto consider = [&](const BranchResult& r) {
    if (!best || r.est < best->est) best = r;
    return r.est <= kTarget;
  };

  bool done = false;
  if (asym_ok && w >= kAsymptoticPreferW) done = consider(eval_asymptotic(tab, t, w));
  if (!done && w <= kSeriesMaxW) done = consider(eval_series_double(tab, t));
  if (!done && asym_ok && w >= kAsymptoticMinW && w < kAsymptoticPreferW) {
    done = consider(eval_asymptotic(tab, t, w));
  }
  if (!done && w <= kExtendedMaxW) done = consider(eval_series_dd(tab, t));
  if (!done && rho_ < 1.0 && (mu_ == 1.0 || mu_ == rho_)) {
    done = consider(eval_integral(tab, t, w));
  }

  if (!best || !(best->est <= kAccept)) {
    throw AccuracyError("E_{rho,mu}(-t) not certifiable at rho=" + std::to_string(rho_) +
                        " mu=" + std::to_string(mu_) + " t=" + std::to_string(t));
  }
  return {best->value, best->est, best->branch};
}

EvalReport mlf_neg(const MlfParams& params, double t) {
  validate(params.rho, params.mu);
  static std::mutex mutex;
  static std::map<std::pair<double, double>, MittagLeffler> cache;
  const MittagLeffler* ml = nullptr;
  {
    std::lock_guard<std::mutex> lock(mutex);
    const auto key = std::make_pair(params.rho, params.mu);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, MittagLeffler(params.rho, params.mu)).first;
    ml = &it->second;  // map nodes are never erased
  }
  return ml->eval_neg(t);
}

namespace {

void validate_solver_rho(double rho) {
  if (!(rho > 0.0 && rho <= 1.0)) {
    throw DomainError("order rho must lie in (0, 1], got " + std::to_string(rho));
  }
}

}  // namespace

double mlf_kernel(double rho, double lambda, double xi) {
  validate_solver_rho(rho);
  if (!(xi > 0.0)) throw DomainError("kernel requires xi > 0");
  if (!(lambda >= 0.0)) throw DomainError("kernel requires lambda >= 0");
  if (rho == 1.0) return std::exp(-lambda * xi);
  const double e = mlf_neg({rho, rho}, lambda * std::pow(xi, rho)).value;
  return std::pow(xi, rho - 1.0) * e;
}

double mlf_kernel_primitive(double rho, double lambda, double a, double b) {
  validate_solver_rho(rho);
  if (!(a >= 0.0) || !(b >= a)) throw DomainError("kernel primitive requires 0 <= a <= b");
  if (!(lambda >= 0.0)) throw DomainError("kernel primitive requires lambda >= 0");
  if (a == b) return 0.0;
  if (lambda == 0.0) {
    return (std::pow(b, rho) - std::pow(a, rho)) * numeric::rgamma(1.0 + rho);
  }

  const double z_b = lambda * std::pow(b, rho);
  if (z_b <= 0.5) {
    // sum_{k>=1} (-1)^{k+1} lambda^{k-1} (b^{rho k} - a^{rho k}) / Gamma(rho k + 1)
    const double log_ratio = a > 0.0 ? std::log(a / b) : -kInf;
    CompensatedSum sum;
    double zk = 1.0;  // (lambda b^rho)^{k-1}
    for (int k = 1; k < 200; ++k) {
      const double kd = static_cast<double>(k);
      const double frac = a > 0.0 ? -std::expm1(rho * kd * log_ratio) : 1.0;
      const double term = zk * frac * numeric::rgamma(rho * kd + 1.0);
      sum.add((k % 2 == 1) ? term : -term);
      if (std::fabs(term) < 1e-18 * std::fabs(sum.value())) break;
      zk *= z_b;
    }
    return std::pow(b, rho) * sum.value();
  }

  const double ea = a > 0.0 ? mlf_neg({rho, 1.0}, lambda * std::pow(a, rho)).value : 1.0;
  const double eb = mlf_neg({rho, 1.0}, z_b).value;
  return (ea - eb) / lambda;
}

double mlf_asymptotic_leading(double rho, double s) {
  if (!(rho > 0.0 && rho < 1.0)) {
    throw DomainError("asymptotic leading term requires rho in (0, 1)");
  }
  if (!(s > 0.0)) throw DomainError("asymptotic leading term requires s > 0");
  return numeric::rgamma(1.0 - rho) / s;
}

double check_decay_bound(const MlfParams& params, std::span<const double> t_samples) {
  if (t_samples.empty()) throw DomainError("decay bound needs at least one sample");
  MittagLeffler ml(params.rho, params.mu);
  double c = 0.0;
  for (const double t : t_samples) c = std::max(c, (1.0 + t) * std::fabs(ml(t)));
  return c;
}

double kernel_bound_constant(double rho, double eps, std::span<const double> lambdas,
                             std::span<const double> t_samples) {
  validate_solver_rho(rho);
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("kernel bound exponent must lie in (0, 1)");
  if (lambdas.empty() || t_samples.empty()) throw DomainError("kernel bound needs samples");
  const MittagLeffler ml(rho, rho);
  double c = 0.0;
  for (const double lambda : lambdas) {
    for (const double t : t_samples) {
      // ratio = s^{1-eps} E_{rho,rho}(-s), s = lambda t^rho
      const double s = lambda * std::pow(t, rho);
      c = std::max(c, std::pow(s, 1.0 - eps) * ml(s));
    }
  }
  return c;
}

}  // namespace fracspec
