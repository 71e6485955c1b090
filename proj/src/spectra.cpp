#include "fracspec/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "fracspec/errors.hpp"
#include "fracspec/simd/kernels.hpp"

namespace fracspec {

// ---------------------------------------------------------------- MultiIndex

std::int64_t MultiIndex::norm_sq() const {
  std::int64_t s = 0;
  for (const auto v : n) s += v * v;
  return s;
}

std::int64_t MultiIndex::max_abs() const {
  std::int64_t m = 0;
  for (const auto v : n) m = std::max<std::int64_t>(m, v < 0 ? -v : v);
  return m;
}

MultiIndex MultiIndex::negated() const {
  MultiIndex out = *this;
  for (auto& v : out.n) v = -v;
  return out;
}

// ------------------------------------------------------------- SpectralField

namespace {

void check_index(const MultiIndex& n, std::size_t dim, std::int64_t truncation) {
  if (n.dim() != dim) {
    throw DomainError("multi-index has dimension " + std::to_string(n.dim()) + ", field has " +
                      std::to_string(dim));
  }
  if (n.norm_sq() >= truncation) {
    throw DomainError("multi-index with |n|^2 = " + std::to_string(n.norm_sq()) +
                      " outside truncation " + std::to_string(truncation));
  }
}

bool entry_less(const SpectralField::Entry& a, const SpectralField::Entry& b) {
  return a.index < b.index;
}

}  // namespace

SpectralField::SpectralField(std::size_t dim, std::int64_t truncation_radius_sq, bool real_valued)
    : dim_(dim), truncation_(truncation_radius_sq), real_valued_(real_valued) {
  if (dim == 0) throw DomainError("spectral field dimension must be at least 1");
  if (truncation_radius_sq < 0) throw DomainError("truncation radius must be nonnegative");
}

SpectralField SpectralField::from_entries(std::size_t dim, std::int64_t truncation_radius_sq,
                                          std::vector<Entry> entries, bool real_valued) {
  SpectralField f(dim, truncation_radius_sq, real_valued);
  for (const auto& e : entries) check_index(e.index, dim, truncation_radius_sq);
  std::stable_sort(entries.begin(), entries.end(), entry_less);
  for (auto& e : entries) {
    if (!f.entries_.empty() && f.entries_.back().index == e.index) {
      f.entries_.back().value += e.value;
    } else {
      f.entries_.push_back(std::move(e));
    }
  }
  return f;
}

void SpectralField::set(const MultiIndex& n, Complex value) {
  check_index(n, dim_, truncation_);
  Entry probe{n, {}};
  auto it = std::lower_bound(entries_.begin(), entries_.end(), probe, entry_less);
  if (it != entries_.end() && it->index == n) {
    it->value = value;
  } else {
    entries_.insert(it, Entry{n, value});
  }
}

Complex SpectralField::get(const MultiIndex& n) const {
  Entry probe{n, {}};
  auto it = std::lower_bound(entries_.begin(), entries_.end(), probe, entry_less);
  if (it != entries_.end() && it->index == n) return it->value;
  return {0.0, 0.0};
}

std::int64_t SpectralField::max_abs_component() const {
  std::int64_t m = 0;
  for (const auto& e : entries_) m = std::max(m, e.index.max_abs());
  return m;
}

double SpectralField::hermitian_defect() const {
  double d = 0.0;
  for (const auto& e : entries_) {
    d = std::max(d, std::abs(get(e.index.negated()) - std::conj(e.value)));
  }
  return d;
}

SpectralField SpectralField::truncated(std::int64_t k) const {
  SpectralField out(dim_, std::min(k, truncation_), real_valued_);
  for (const auto& e : entries_) {
    if (e.index.norm_sq() < k) out.entries_.push_back(e);
  }
  return out;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  if (other.dim_ != dim_) throw DomainError("adding spectral fields of different dimension");
  std::vector<Entry> merged = entries_;
  merged.insert(merged.end(), other.entries_.begin(), other.entries_.end());
  *this = from_entries(dim_, std::max(truncation_, other.truncation_), std::move(merged),
                       real_valued_ && other.real_valued_);
  return *this;
}

SpectralField& SpectralField::operator*=(Complex s) {
  for (auto& e : entries_) e.value *= s;
  if (s.imag() != 0.0) real_valued_ = false;
  return *this;
}

// ----------------------------------------------------------------- GridField

GridField::GridField(std::size_t dim, std::size_t points_per_axis) : dim_(dim), m_(points_per_axis) {
  if (dim == 0) throw DomainError("grid dimension must be at least 1");
  if (points_per_axis < 3 || points_per_axis % 2 == 0) {
    throw DomainError("points per axis must be odd and at least 3, got " +
                      std::to_string(points_per_axis));
  }
  std::size_t total = 1;
  for (std::size_t a = 0; a < dim; ++a) total *= points_per_axis;
  samples_.assign(total, Complex{0.0, 0.0});
}

GridField GridField::from_function(std::size_t dim, std::size_t points_per_axis,
                                   const std::function<Complex(std::span<const double>)>& f) {
  GridField g(dim, points_per_axis);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto x = g.point(i);
    g.samples_[i] = f(x);
  }
  return g;
}

double GridField::coordinate(std::size_t j) const {
  return -std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(m_);
}

std::vector<double> GridField::point(std::size_t flat) const {
  std::vector<double> x(dim_);
  for (std::size_t a = dim_; a-- > 0;) {
    x[a] = coordinate(flat % m_);
    flat /= m_;
  }
  return x;
}

double GridField::sup_norm() const {
  double m = 0.0;
  for (const auto& v : samples_) m = std::max(m, std::abs(v));
  return m;
}

bool GridField::is_real() const {
  return std::all_of(samples_.begin(), samples_.end(), [](const Complex& v) { return v.imag() == 0.0; });
}

// ----------------------------------------------------------- DerivMultiIndex

int DerivMultiIndex::order() const {
  int s = 0;
  for (const int a : alpha) s += a;
  return s;
}

void DerivMultiIndex::validate(std::size_t dim) const {
  if (alpha.size() != dim) throw DomainError("derivative multi-index has the wrong dimension");
  for (const int a : alpha) {
    if (a < 0) throw DomainError("derivative orders must be nonnegative");
  }
  if (order() > 2) throw DomainError("derivative order |alpha| must not exceed 2");
}

// ------------------------------------------------------------ lattice points

namespace {

std::int64_t isqrt(std::int64_t v) {
  if (v <= 0) return 0;
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(v)));
  while (r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r;
}

// Box radius covering every |n|^2 < k.
std::int64_t box_radius(std::int64_t k) { return k <= 1 ? 0 : isqrt(k - 1); }

void enumerate(std::size_t dim, std::int64_t k, std::vector<std::int64_t>& prefix,
               std::int64_t used, std::vector<MultiIndex>& out) {
  if (prefix.size() == dim) {
    out.emplace_back(prefix);
    return;
  }
  const std::int64_t r = box_radius(k - used);
  for (std::int64_t v = -r; v <= r; ++v) {
    if (used + v * v >= k) continue;
    prefix.push_back(v);
    enumerate(dim, k, prefix, used + v * v, out);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<MultiIndex> lattice_points(std::size_t dim, std::int64_t k) {
  std::vector<MultiIndex> out;
  if (k <= 0 || dim == 0) return out;
  std::vector<std::int64_t> prefix;
  enumerate(dim, k, prefix, 0, out);
  return out;
}

// ---------------------------------------------------------------- transforms

namespace {

// Structure-of-arrays complex tensor, row-major, axis 0 slowest.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> re;
  std::vector<double> im;

  explicit Tensor(std::vector<std::size_t> s) : shape(std::move(s)) {
    std::size_t total = 1;
    for (const auto v : shape) total *= v;
    re.assign(total, 0.0);
    im.assign(total, 0.0);
  }
};

// cos/sin(2 pi q / M) for q = 0..M-1.
struct Twiddles {
  std::size_t m;
  std::vector<double> c;
  std::vector<double> s;

  explicit Twiddles(std::size_t m_) : m(m_), c(m_), s(m_) {
    for (std::size_t q = 0; q < m; ++q) {
      const double ang = 2.0 * std::numbers::pi * static_cast<double>(q) / static_cast<double>(m);
      c[q] = std::cos(ang);
      s[q] = std::sin(ang);
    }
  }

  // e^{i sign n (x_j + pi)} * (-1)^n = e^{i sign n x_j} with x_j = -pi + 2 pi j / M.
  void phase(std::int64_t n, std::size_t j, int sign, double scale, double& re, double& im) const {
    const auto mm = static_cast<std::int64_t>(m);
    std::int64_t q = (n % mm) * static_cast<std::int64_t>(j) % mm;
    if (q < 0) q += mm;
    const double parity = (n % 2 == 0) ? 1.0 : -1.0;
    re = parity * scale * c[static_cast<std::size_t>(q)];
    im = parity * scale * sign * s[static_cast<std::size_t>(q)];
  }
};

// Largest weight table (entries) precomputed per axis; larger transforms
// regenerate weights per output index.
constexpr std::size_t kMaxTableEntries = std::size_t{1} << 22;

// Applies out[p] = sum_q W(p, q) in[q] along one axis. fill(p, wre, wim)
// writes the in_len weights of output p.
template <class Fill>
Tensor transform_axis(const Tensor& in, std::size_t axis, std::size_t out_len, const Fill& fill) {
  const auto& kern = simd::active();
  const std::size_t in_len = in.shape[axis];
  std::size_t outer = 1;
  for (std::size_t a = 0; a < axis; ++a) outer *= in.shape[a];
  std::size_t inner = 1;
  for (std::size_t a = axis + 1; a < in.shape.size(); ++a) inner *= in.shape[a];

  std::vector<std::size_t> out_shape = in.shape;
  out_shape[axis] = out_len;
  Tensor out(out_shape);

  const bool tabulate = out_len * in_len <= kMaxTableEntries;
  std::vector<double> tab_re;
  std::vector<double> tab_im;
  if (tabulate) {
    tab_re.resize(out_len * in_len);
    tab_im.resize(out_len * in_len);
    for (std::size_t p = 0; p < out_len; ++p) fill(p, &tab_re[p * in_len], &tab_im[p * in_len]);
  }
  std::vector<double> line_re(in_len);
  std::vector<double> line_im(in_len);
  std::vector<double> w_re(tabulate ? 0 : in_len);
  std::vector<double> w_im(tabulate ? 0 : in_len);

  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t i = 0; i < inner; ++i) {
      const std::size_t in_base = o * in_len * inner + i;
      for (std::size_t q = 0; q < in_len; ++q) {
        line_re[q] = in.re[in_base + q * inner];
        line_im[q] = in.im[in_base + q * inner];
      }
      const std::size_t out_base = o * out_len * inner + i;
      for (std::size_t p = 0; p < out_len; ++p) {
        const double* wr;
        const double* wi;
        if (tabulate) {
          wr = &tab_re[p * in_len];
          wi = &tab_im[p * in_len];
        } else {
          fill(p, w_re.data(), w_im.data());
          wr = w_re.data();
          wi = w_im.data();
        }
        double sr = 0.0;
        double si = 0.0;
        kern.cdot(wr, wi, line_re.data(), line_im.data(), in_len, &sr, &si);
        out.re[out_base + p * inner] = sr;
        out.im[out_base + p * inner] = si;
      }
    }
  }
  return out;
}

std::size_t box_offset(const MultiIndex& n, std::int64_t r) {
  const auto side = static_cast<std::size_t>(2 * r + 1);
  std::size_t off = 0;
  for (const auto v : n.n) off = off * side + static_cast<std::size_t>(v + r);
  return off;
}

}  // namespace

SpectralField analyze(const GridField& g, std::int64_t truncation_radius_sq) {
  const std::size_t dim = g.dim();
  const std::size_t m = g.points_per_axis();
  const std::int64_t r = box_radius(truncation_radius_sq);
  const auto nyquist = static_cast<std::int64_t>((m - 1) / 2);
  if (r > nyquist) {
    throw AliasError("truncation |n|^2 < " + std::to_string(truncation_radius_sq) +
                     " needs |n_i| up to " + std::to_string(r) + " but a grid of " +
                     std::to_string(m) + " points resolves only " + std::to_string(nyquist));
  }
  SpectralField out(dim, truncation_radius_sq, g.is_real());
  if (truncation_radius_sq <= 0) return out;

  Tensor t(std::vector<std::size_t>(dim, m));
  for (std::size_t i = 0; i < g.size(); ++i) {
    t.re[i] = g[i].real();
    t.im[i] = g[i].imag();
  }
  const Twiddles tw(m);
  const auto side = static_cast<std::size_t>(2 * r + 1);
  const double scale = 1.0 / static_cast<double>(m);
  auto fill = [&](std::size_t p, double* wr, double* wi) {
    const std::int64_t n = static_cast<std::int64_t>(p) - r;
    for (std::size_t j = 0; j < m; ++j) tw.phase(n, j, -1, scale, wr[j], wi[j]);
  };
  for (std::size_t axis = 0; axis < dim; ++axis) t = transform_axis(t, axis, side, fill);

  std::vector<SpectralField::Entry> entries;
  for (auto& n : lattice_points(dim, truncation_radius_sq)) {
    const std::size_t off = box_offset(n, r);
    entries.push_back({std::move(n), Complex{t.re[off], t.im[off]}});
  }
  return SpectralField::from_entries(dim, truncation_radius_sq, std::move(entries), g.is_real());
}

GridField synthesize(const SpectralField& c, std::size_t points_per_axis) {
  const std::size_t dim = c.dim();
  GridField g(dim, points_per_axis);
  const std::size_t m = points_per_axis;
  const std::int64_t r = c.max_abs_component();
  const auto nyquist = static_cast<std::int64_t>((m - 1) / 2);
  if (r > nyquist) {
    throw AliasError("mode with |n_i| = " + std::to_string(r) + " aliases on a grid of " +
                     std::to_string(m) + " points");
  }
  if (c.empty()) return g;

  const auto side = static_cast<std::size_t>(2 * r + 1);
  Tensor t(std::vector<std::size_t>(dim, side));
  for (const auto& e : c.entries()) {
    const std::size_t off = box_offset(e.index, r);
    t.re[off] += e.value.real();
    t.im[off] += e.value.imag();
  }
  const Twiddles tw(m);
  auto fill = [&](std::size_t j, double* wr, double* wi) {
    for (std::size_t q = 0; q < side; ++q) {
      tw.phase(static_cast<std::int64_t>(q) - r, j, +1, 1.0, wr[q], wi[q]);
    }
  };
  for (std::size_t axis = 0; axis < dim; ++axis) t = transform_axis(t, axis, m, fill);

  const bool real = c.real_valued();
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = Complex{t.re[i], real ? 0.0 : t.im[i]};
  return g;
}

// --------------------------------------------------------- norms and powers

double liouville_norm_sq(const SpectralField& c, double a) {
  const std::size_t n = c.size();
  std::vector<double> w(n);
  std::vector<double> re(n);
  std::vector<double> im(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& e = c.entries()[i];
    w[i] = std::pow(1.0 + static_cast<double>(e.index.norm_sq()), a);
    re[i] = e.value.real();
    im[i] = e.value.imag();
  }
  return simd::active().weighted_norm2(w.data(), re.data(), im.data(), n);
}

std::vector<double> liouville_partial_sums(const SpectralField& c, double a,
                                           std::span<const std::int64_t> radii) {
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (radii[i] < 0 || (i > 0 && radii[i] < radii[i - 1])) {
      throw DomainError("partial-sum radii must be nonnegative and nondecreasing");
    }
  }
  // Terms grouped by |n|^2, then accumulated shell by shell in a fixed order.
  std::vector<std::pair<std::int64_t, double>> terms;
  terms.reserve(c.size());
  for (const auto& e : c.entries()) {
    const auto nsq = e.index.norm_sq();
    terms.emplace_back(nsq, std::pow(1.0 + static_cast<double>(nsq), a) * std::norm(e.value));
  }
  std::stable_sort(terms.begin(), terms.end(),
                   [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<double> out(radii.size());
  double acc = 0.0;
  std::size_t next = 0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const std::int64_t k2 = radii[i] * radii[i];
    while (next < terms.size() && terms[next].first <= k2) acc += terms[next++].second;
    out[i] = acc;
  }
  return out;
}

bool partial_sums_stabilize(std::span<const double> sums, double rel_threshold) {
  if (sums.size() < 3) throw DomainError("stabilization test needs at least 3 partial sums");
  const std::size_t n = sums.size();
  const double last = sums[n - 1] - sums[n - 2];
  const double prev = sums[n - 2] - sums[n - 3];
  if (last <= rel_threshold * sums[n - 1]) return true;
  return last < prev;
}

SpectralField apply_fractional_power(const SpectralField& c, double tau) {
  if (tau == 0.0) return c;
  std::vector<SpectralField::Entry> entries;
  entries.reserve(c.size());
  for (const auto& e : c.entries()) {
    const auto nsq = static_cast<double>(e.index.norm_sq());
    if (nsq == 0.0) {
      if (tau < 0.0 && e.value != Complex{0.0, 0.0}) {
        throw ZeroModeError("negative operator power applied to a field with nonzero mean");
      }
      entries.push_back({e.index, Complex{0.0, 0.0}});
      continue;
    }
    entries.push_back({e.index, e.value * std::pow(nsq, tau)});
  }
  return SpectralField::from_entries(c.dim(), c.truncation_radius_sq(), std::move(entries),
                                     c.real_valued());
}

double embedding_constant(std::span<const SpectralField> samples, double sigma,
                          const DerivMultiIndex& alpha) {
  if (samples.empty()) throw DomainError("embedding constant needs at least one field");
  const std::size_t dim = samples.front().dim();
  const double threshold = 1.0 + static_cast<double>(dim) / 4.0;
  if (!(sigma > threshold)) {
    throw HypothesisError("embedding estimate requires sigma > 1 + N/4 = " + std::to_string(threshold));
  }
  alpha.validate(dim);

  // i^{|alpha|}
  static const Complex kIPow[3] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}};
  const Complex i_pow = kIPow[alpha.order()];
  const double l2_scale = std::pow(2.0 * std::numbers::pi, static_cast<double>(dim) / 2.0);

  double best = 0.0;
  for (const auto& g : samples) {
    if (g.dim() != dim) throw DomainError("embedding sample fields must share one dimension");
    double sum_sq = 0.0;
    std::vector<SpectralField::Entry> entries;
    entries.reserve(g.size());
    for (const auto& e : g.entries()) {
      sum_sq += std::norm(e.value);
      double mono = 1.0;
      for (std::size_t a = 0; a < dim; ++a) {
        for (int p = 0; p < alpha.alpha[a]; ++p) mono *= static_cast<double>(e.index.n[a]);
      }
      const double damp = std::pow(1.0 + static_cast<double>(e.index.norm_sq()), -sigma);
      entries.push_back({e.index, e.value * i_pow * (mono * damp)});
    }
    if (sum_sq == 0.0) continue;
    const SpectralField h =
        SpectralField::from_entries(dim, g.truncation_radius_sq(), std::move(entries));
    const std::int64_t r = std::max<std::int64_t>(1, g.max_abs_component());
    const auto m = static_cast<std::size_t>(8 * r + 1);
    const double sup = synthesize(h, m).sup_norm();
    best = std::max(best, sup / (l2_scale * std::sqrt(sum_sq)));
  }
  return best;
}

}  // namespace fracspec
