#include "fracspec/modal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "fracspec/errors.hpp"
#include "fracspec/mlf.hpp"
#include "fracspec/numeric/gamma.hpp"
#include "fracspec/simd/kernels.hpp"

namespace fracspec {

struct TimeProfile::Data {
  Kind kind = Kind::constant;
  double a = 0.0;  // constant value, omega or rate
  double b = 0.0;  // phase
  std::vector<double> coeffs;
  std::vector<double> nodes;
  std::vector<double> values;
};

namespace {

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw DomainError(std::string(what) + " must be finite");
}

}  // namespace

TimeProfile::TimeProfile() : data_(std::make_shared<const Data>()) {}

TimeProfile TimeProfile::constant(double c) {
  require_finite(c, "constant profile value");
  auto d = std::make_shared<Data>();
  d->kind = Kind::constant;
  d->a = c;
  return TimeProfile(std::move(d));
}

TimeProfile TimeProfile::polynomial(std::vector<double> coeffs) {
  for (const double c : coeffs) require_finite(c, "polynomial coefficient");
  auto d = std::make_shared<Data>();
  d->kind = Kind::polynomial;
  d->coeffs = std::move(coeffs);
  return TimeProfile(std::move(d));
}

TimeProfile TimeProfile::cosine(double omega, double phase) {
  require_finite(omega, "cosine frequency");
  require_finite(phase, "cosine phase");
  auto d = std::make_shared<Data>();
  d->kind = Kind::cosine;
  d->a = omega;
  d->b = phase;
  return TimeProfile(std::move(d));
}

TimeProfile TimeProfile::exponential(double rate) {
  require_finite(rate, "exponential rate");
  auto d = std::make_shared<Data>();
  d->kind = Kind::exponential;
  d->a = rate;
  return TimeProfile(std::move(d));
}

TimeProfile TimeProfile::sampled(std::vector<double> nodes, std::vector<double> values) {
  if (nodes.size() < 2 || nodes.size() != values.size()) {
    throw DomainError("sampled profile needs matching node and value lists of length >= 2");
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    require_finite(nodes[i], "sampled profile node");
    require_finite(values[i], "sampled profile value");
    if (i > 0 && !(nodes[i] > nodes[i - 1])) {
      throw DomainError("sampled profile nodes must be strictly increasing");
    }
  }
  auto d = std::make_shared<Data>();
  d->kind = Kind::sampled;
  d->nodes = std::move(nodes);
  d->values = std::move(values);
  return TimeProfile(std::move(d));
}

double TimeProfile::operator()(double t) const {
  const Data& d = *data_;
  switch (d.kind) {
    case Kind::constant:
      return d.a;
    case Kind::polynomial: {
      double acc = 0.0;
      for (std::size_t k = d.coeffs.size(); k-- > 0;) acc = acc * t + d.coeffs[k];
      return acc;
    }
    case Kind::cosine:
      return std::cos(d.a * t + d.b);
    case Kind::exponential:
      return std::exp(d.a * t);
    case Kind::sampled: {
      if (!(t >= d.nodes.front() && t <= d.nodes.back())) {
        throw DomainError("sampled profile evaluated outside its nodes at t=" + std::to_string(t));
      }
      const auto it = std::upper_bound(d.nodes.begin(), d.nodes.end(), t);
      if (it == d.nodes.end()) return d.values.back();
      const std::size_t i = static_cast<std::size_t>(it - d.nodes.begin()) - 1;
      const double u = (t - d.nodes[i]) / (d.nodes[i + 1] - d.nodes[i]);
      return d.values[i] + u * (d.values[i + 1] - d.values[i]);
    }
  }
  return 0.0;
}

TimeProfile::Kind TimeProfile::kind() const { return data_->kind; }

bool TimeProfile::is_zero() const {
  const Data& d = *data_;
  switch (d.kind) {
    case Kind::constant:
      return d.a == 0.0;
    case Kind::polynomial:
      return std::all_of(d.coeffs.begin(), d.coeffs.end(), [](double c) { return c == 0.0; });
    case Kind::sampled:
      return std::all_of(d.values.begin(), d.values.end(), [](double v) { return v == 0.0; });
    case Kind::cosine:
    case Kind::exponential:
      return false;
  }
  return false;
}

double TimeProfile::sup_abs(double T) const {
  constexpr int kSamples = 1024;
  double m = 0.0;
  for (int i = 0; i <= kSamples; ++i) m = std::max(m, std::fabs((*this)(T * i / kSamples)));
  for (const double x : data_->nodes) {
    if (x >= 0.0 && x <= T) m = std::max(m, std::fabs((*this)(x)));
  }
  return m;
}

double TimeProfile::constant_value() const { return data_->a; }
double TimeProfile::omega() const { return data_->a; }
double TimeProfile::phase() const { return data_->b; }
double TimeProfile::rate() const { return data_->a; }
const std::vector<double>& TimeProfile::coefficients() const { return data_->coeffs; }
const std::vector<double>& TimeProfile::nodes() const { return data_->nodes; }
const std::vector<double>& TimeProfile::values() const { return data_->values; }

Complex ModeForcing::operator()(double t) const {
  Complex acc = 0.0;
  for (const Term& term : terms_) {
    if (term.weight != 0.0) acc += term.weight * term.profile(t);
  }
  return acc;
}

bool ModeForcing::is_zero() const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [](const Term& t) { return t.weight == 0.0 || t.profile.is_zero(); });
}

GradedMesh GradedMesh::for_order(double rho, double T, std::size_t M) {
  if (!(rho > 0.0)) throw DomainError("grading needs rho > 0");
  return {T, M, std::clamp(2.0 / rho, 1.0, 4.0)};
}

void GradedMesh::validate() const {
  if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("mesh final time must be positive");
  if (M < 1) throw DomainError("mesh needs at least one subinterval");
  if (!(r >= 1.0) || !std::isfinite(r)) throw DomainError("mesh grading exponent must be >= 1");
}

double GradedMesh::node(std::size_t j) const {
  if (j >= M) return T;  // exact endpoint
  return T * std::pow(static_cast<double>(j) / static_cast<double>(M), r);
}

std::vector<double> GradedMesh::nodes() const {
  std::vector<double> out(M + 1);
  for (std::size_t j = 0; j <= M; ++j) out[j] = node(j);
  return out;
}

namespace {

void validate_order(double rho) {
  if (!(rho > 0.0 && rho <= 1.0)) {
    throw DomainError("order rho must lie in (0, 1], got " + std::to_string(rho));
  }
}

void validate_lambda(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw DomainError("eigenvalue lambda must be finite and >= 0");
  }
}

// P(s) = int_0^s K, accurate to a few ulps relative.
class KernelPrimitive {
 public:
  KernelPrimitive(double rho, double lambda) : rho_(rho), lambda_(lambda) {
    if (lambda > 0.0 && rho < 1.0) ml_.emplace(rho, 1.0);
    rgamma_ = numeric::rgamma(1.0 + rho);
  }

  double operator()(double s) const {
    if (s == 0.0) return 0.0;
    if (lambda_ == 0.0) return std::pow(s, rho_) * rgamma_;
    if (rho_ == 1.0) return -std::expm1(-lambda_ * s) / lambda_;
    const double z = lambda_ * std::pow(s, rho_);
    if (z <= 0.5) return mlf_kernel_primitive(rho_, lambda_, 0.0, s);
    return (1.0 - (*ml_)(z)) / lambda_;
  }

 private:
  double rho_;
  double lambda_;
  double rgamma_ = 0.0;
  std::optional<MittagLeffler> ml_;
};

// Mesh s_j = t (j/M)^r and primitives P_j for one evaluation time, refined by
// interleaving; refinement keeps the coarse nodes bitwise.
class ConvolutionTable {
 public:
  ConvolutionTable(const KernelPrimitive& prim, double t, double r, std::size_t M)
      : prim_(prim), t_(t), r_(r) {
    nodes_.resize(M + 1);
    p_.resize(M + 1);
    for (std::size_t j = 0; j <= M; ++j) {
      nodes_[j] = node(j, M);
      p_[j] = prim_(nodes_[j]);
    }
  }

  [[nodiscard]] std::size_t intervals() const { return nodes_.size() - 1; }

  void refine() {
    const std::size_t m = intervals();
    std::vector<double> n2(2 * m + 1);
    std::vector<double> p2(2 * m + 1);
    for (std::size_t j = 0; j <= m; ++j) {
      n2[2 * j] = nodes_[j];
      p2[2 * j] = p_[j];
    }
    for (std::size_t j = 0; j < m; ++j) {
      n2[2 * j + 1] = node(2 * j + 1, 2 * m);
      p2[2 * j + 1] = prim_(n2[2 * j + 1]);
    }
    nodes_ = std::move(n2);
    p_ = std::move(p2);
  }

  // Product rule on the subgrid of every stride-th node.
  [[nodiscard]] Complex integrate(const ModeForcing& f, std::size_t stride) const {
    const std::size_t m = intervals() / stride;
    weights_.resize(m);
    re_.resize(m);
    im_.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t a = j * stride;
      const std::size_t b = a + stride;
      weights_[j] = p_[b] - p_[a];
      const Complex fv = f(t_ - 0.5 * (nodes_[a] + nodes_[b]));
      re_[j] = fv.real();
      im_[j] = fv.imag();
    }
    double out_re = 0.0;
    double out_im = 0.0;
    simd::active().dot2(weights_.data(), re_.data(), im_.data(), m, &out_re, &out_im);
    return {out_re, out_im};
  }

 private:
  [[nodiscard]] double node(std::size_t j, std::size_t m) const {
    if (j == m) return t_;
    return t_ * std::pow(static_cast<double>(j) / static_cast<double>(m), r_);
  }

  const KernelPrimitive& prim_;
  double t_;
  double r_;
  std::vector<double> nodes_;
  std::vector<double> p_;
  mutable std::vector<double> weights_;
  mutable std::vector<double> re_;
  mutable std::vector<double> im_;
};

double default_tolerance(double rho) { return rho == 1.0 ? 1e-8 : 1e-6; }

}  // namespace

Complex convolve_kernel(double rho, double lambda, const ModeForcing& f_n, double t,
                        const GradedMesh& mesh) {
  validate_order(rho);
  validate_lambda(lambda);
  mesh.validate();
  if (!(t > 0.0 && t <= mesh.T)) throw DomainError("convolution time must lie in (0, T]");
  const KernelPrimitive prim(rho, lambda);
  const ConvolutionTable table(prim, t, mesh.r, mesh.M);
  return table.integrate(f_n, 1);
}

ModeSolution solve_mode(double rho, double lambda, Complex phi_n, const ModeForcing& f_n,
                        std::span<const double> times, const GradedMesh& mesh,
                        const ModalOptions& options) {
  validate_order(rho);
  validate_lambda(lambda);
  mesh.validate();
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0 && times[i] <= mesh.T)) {
      throw DomainError("solve times must lie in [0, T]");
    }
    if (i > 0 && times[i] < times[i - 1]) throw DomainError("solve times must be sorted");
  }
  if (options.max_doublings < 0) throw DomainError("max_doublings must be >= 0");
  const double tol = options.tolerance > 0.0 ? options.tolerance : default_tolerance(rho);

  ModeSolution sol;
  sol.lambda = lambda;
  sol.phi_n = phi_n;
  sol.times.assign(times.begin(), times.end());
  sol.values.assign(times.size(), Complex(0.0));

  std::optional<MittagLeffler> relax;
  if (rho < 1.0 && lambda > 0.0) relax.emplace(rho, 1.0);
  double peak = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    double e = 1.0;
    if (t > 0.0 && lambda > 0.0) {
      e = rho == 1.0 ? std::exp(-lambda * t) : (*relax)(lambda * std::pow(t, rho));
    }
    sol.values[i] = phi_n == 0.0 ? Complex(0.0) : phi_n * e;
    peak = std::max(peak, std::abs(sol.values[i]));
  }
  if (f_n.is_zero() || times.empty() || times.back() == 0.0) return sol;

  const KernelPrimitive prim(rho, lambda);

  // Probe at the largest time for the mesh size, then certify every time at it.
  std::size_t m = std::max<std::size_t>(mesh.M, 2);
  int doublings = 0;
  {
    ConvolutionTable probe(prim, times.back(), mesh.r, m);
    Complex prev = probe.integrate(f_n, 1);
    for (;;) {
      if (doublings >= options.max_doublings) break;
      probe.refine();
      ++doublings;
      m *= 2;
      const Complex cur = probe.integrate(f_n, 1);
      const double scale = std::max({1.0, peak, std::abs(cur)});
      if (std::abs(cur - prev) <= 0.5 * tol * scale) break;
      prev = cur;
    }
  }

  std::vector<Complex> conv(times.size(), Complex(0.0));
  for (;;) {
    double worst = 0.0;
    double conv_peak = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (times[i] == 0.0) continue;
      const ConvolutionTable table(prim, times[i], mesh.r, m);
      conv[i] = table.integrate(f_n, 1);
      worst = std::max(worst, std::abs(conv[i] - table.integrate(f_n, 2)));
      conv_peak = std::max(conv_peak, std::abs(sol.values[i] + conv[i]));
    }
    if (worst <= tol * std::max({1.0, peak, conv_peak})) {
      sol.quadrature_error_est = worst;
      break;
    }
    if (doublings >= options.max_doublings) {
      throw ConvergenceError("mode convolution not certified to " + std::to_string(tol) +
                             " after " + std::to_string(doublings) + " mesh doublings (lambda=" +
                             std::to_string(lambda) + ", estimate " + std::to_string(worst) + ")");
    }
    ++doublings;
    m *= 2;
  }
  sol.mesh_M = m;
  for (std::size_t i = 0; i < times.size(); ++i) sol.values[i] += conv[i];
  return sol;
}

namespace {

void validate_l1(std::size_t n, double dt, double rho) {
  if (!(rho > 0.0 && rho < 1.0)) {
    throw DomainError("L1 differentiator requires rho in (0, 1), got " + std::to_string(rho));
  }
  if (n < 2) throw DomainError("L1 differentiator needs at least 2 samples");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("time step must be positive");
}

// b_j = (j+1)^{1-rho} - j^{1-rho}, without cancellation for large j.
std::vector<double> l1_weights(std::size_t n, double rho) {
  std::vector<double> b(n);
  const double p = 1.0 - rho;
  if (n > 0) b[0] = 1.0;
  for (std::size_t j = 1; j < n; ++j) {
    const double jd = static_cast<double>(j);
    b[j] = std::pow(jd, p) * std::expm1(p * std::log1p(1.0 / jd));
  }
  return b;
}

}  // namespace

std::vector<double> caputo_l1(std::span<const double> h, double dt, double rho) {
  validate_l1(h.size(), dt, rho);
  const std::size_t n = h.size();
  const std::vector<double> b = l1_weights(n - 1, rho);
  // rev[k] = h_{n-1-k} - h_{n-2-k}, so the differences ending at t_m start at rev[n-1-m].
  std::vector<double> rev(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) rev[k] = h[n - 1 - k] - h[n - 2 - k];
  const double scale = std::pow(dt, -rho) * numeric::rgamma(2.0 - rho);
  const auto& kern = simd::active();
  std::vector<double> out(n, 0.0);
  for (std::size_t m = 1; m < n; ++m) out[m] = scale * kern.dot(b.data(), rev.data() + (n - 1 - m), m);
  return out;
}

std::vector<Complex> caputo_l1(std::span<const Complex> h, double dt, double rho) {
  validate_l1(h.size(), dt, rho);
  const std::size_t n = h.size();
  const std::vector<double> b = l1_weights(n - 1, rho);
  std::vector<double> rev_re(n - 1);
  std::vector<double> rev_im(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const Complex d = h[n - 1 - k] - h[n - 2 - k];
    rev_re[k] = d.real();
    rev_im[k] = d.imag();
  }
  const double scale = std::pow(dt, -rho) * numeric::rgamma(2.0 - rho);
  const auto& kern = simd::active();
  std::vector<Complex> out(n, Complex(0.0));
  for (std::size_t m = 1; m < n; ++m) {
    double re = 0.0;
    double im = 0.0;
    const std::size_t off = n - 1 - m;
    kern.dot2(b.data(), rev_re.data() + off, rev_im.data() + off, m, &re, &im);
    out[m] = {scale * re, scale * im};
  }
  return out;
}

std::vector<double> riemann_liouville_l1(std::span<const double> h, double dt, double rho) {
  std::vector<double> c = caputo_l1(h, dt, rho);
  const double g = numeric::rgamma(1.0 - rho);
  std::vector<double> out(h.size() - 1);
  for (std::size_t m = 1; m < h.size(); ++m) {
    out[m - 1] = c[m] + h[0] * std::pow(static_cast<double>(m) * dt, -rho) * g;
  }
  return out;
}

double riemann_liouville_l1_at(std::span<const double> h, double dt, double rho, std::size_t m) {
  validate_l1(h.size(), dt, rho);
  if (m == 0) throw DomainError("Riemann-Liouville derivative is singular at t = 0");
  if (m >= h.size()) throw DomainError("node index beyond the samples");
  return riemann_liouville_l1(h.first(m + 1), dt, rho).back();
}

std::vector<Complex> time_derivative_uniform(std::span<const Complex> h, double dt, double rho) {
  if (rho < 1.0) return caputo_l1(h, dt, rho);
  if (rho != 1.0) throw DomainError("time derivative order must lie in (0, 1]");
  if (h.size() < 2) throw DomainError("time derivative needs at least 2 samples");
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  std::vector<Complex> out(h.size(), Complex(0.0));
  out[1] = (h[1] - h[0]) / dt;
  for (std::size_t m = 2; m < h.size(); ++m) {
    out[m] = (3.0 * h[m] - 4.0 * h[m - 1] + h[m - 2]) / (2.0 * dt);
  }
  return out;
}

std::vector<double> uniform_times(double T, std::size_t steps) {
  if (!(T > 0.0)) throw DomainError("final time must be positive");
  if (steps < 1) throw DomainError("need at least one time step");
  std::vector<double> t(steps + 1);
  for (std::size_t j = 0; j < steps; ++j) t[j] = T * static_cast<double>(j) / static_cast<double>(steps);
  t[steps] = T;
  return t;
}

namespace {

constexpr double kInitialLayer = 0.05;

std::size_t steps_for(double T, double dt) {
  if (!(dt > 0.0) || !(T > 0.0)) throw DomainError("verification needs dt > 0 and T > 0");
  const double q = T / dt;
  const double r = std::round(q);
  if (r < 2.0 || std::fabs(q - r) > 1e-9 * r) {
    throw DomainError("T / dt must be an integer >= 2");
  }
  return static_cast<std::size_t>(r);
}

struct ResidualSplit {
  double main = 0.0;
  double layer = 0.0;
};

ResidualSplit mode_residual(double rho, double lambda, const ModeForcing& f,
                            std::span<const Complex> w, std::span<const double> t, double dt,
                            double T) {
  const std::vector<Complex> d = time_derivative_uniform(w, dt, rho);
  ResidualSplit r;
  for (std::size_t m = 1; m < w.size(); ++m) {
    const double res = std::abs(d[m] + lambda * w[m] - f(t[m]));
    if (t[m] >= kInitialLayer * T) {
      r.main = std::max(r.main, res);
    } else {
      r.layer = std::max(r.layer, res);
    }
  }
  return r;
}

}  // namespace

CauchyReport verify_cauchy(double rho, double lambda, Complex phi_n, const ModeForcing& f_n,
                           double dt, double T, const ModalOptions& options) {
  validate_order(rho);
  const std::size_t steps = steps_for(T, dt);
  const std::vector<double> fine_t = uniform_times(T, 2 * steps);
  const ModeSolution fine =
      solve_mode(rho, lambda, phi_n, f_n, fine_t, GradedMesh::for_order(rho, T, 64), options);

  std::vector<double> coarse_t(steps + 1);
  std::vector<Complex> coarse_w(steps + 1);
  for (std::size_t j = 0; j <= steps; ++j) {
    coarse_t[j] = fine_t[2 * j];
    coarse_w[j] = fine.values[2 * j];
  }

  CauchyReport rep;
  rep.dt = dt;
  rep.initial_error = std::abs(fine.values[0] - phi_n);
  rep.quadrature_error_est = fine.quadrature_error_est;
  const ResidualSplit rc = mode_residual(rho, lambda, f_n, coarse_w, coarse_t, dt, T);
  const ResidualSplit rf = mode_residual(rho, lambda, f_n, fine.values, fine_t, dt / 2, T);
  rep.sup_residual = rc.main;
  rep.sup_residual_half = rf.main;
  rep.initial_layer_residual = rf.layer;
  if (rc.main == 0.0 && rf.main == 0.0) {
    rep.observed_rate = std::numeric_limits<double>::infinity();
    return rep;
  }
  rep.observed_rate = std::log2(rc.main / rf.main);
  if (!(rf.main < rc.main)) {
    throw ConvergenceError("mode residual did not decrease under dt halving (" +
                           std::to_string(rc.main) + " -> " + std::to_string(rf.main) + ")");
  }
  return rep;
}

}  // namespace fracspec
