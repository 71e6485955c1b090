#pragma once

// Fourier analysis on the torus (-pi, pi]^N. Coefficients follow
//   g_n = (2 pi)^{-N} \int g(x) e^{-i n.x} dx,   g(x) = sum_n g_n e^{i n.x},
// so that \int |g|^2 = (2 pi)^N sum |g_n|^2.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace fracspec {

using Complex = std::complex<double>;

/// Lattice point n in Z^N.
struct MultiIndex {
  std::vector<std::int64_t> n;

  MultiIndex() = default;
  explicit MultiIndex(std::vector<std::int64_t> comps) : n(std::move(comps)) {}
  MultiIndex(std::initializer_list<std::int64_t> comps) : n(comps) {}

  [[nodiscard]] std::size_t dim() const { return n.size(); }
  /// |n|^2; exact for components up to 2^20 in up to 3 dimensions (and far beyond).
  [[nodiscard]] std::int64_t norm_sq() const;
  [[nodiscard]] std::int64_t max_abs() const;
  [[nodiscard]] MultiIndex negated() const;

  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
};

/// Finite coefficient map n -> c_n with |n|^2 < truncation_radius_sq for every key.
/// Entries are kept sorted by index; explicit zeros are allowed.
class SpectralField {
 public:
  struct Entry {
    MultiIndex index;
    Complex value;
  };

  SpectralField() = default;
  SpectralField(std::size_t dim, std::int64_t truncation_radius_sq, bool real_valued = false);

  /// Builds from unsorted entries; duplicate indices are summed.
  static SpectralField from_entries(std::size_t dim, std::int64_t truncation_radius_sq,
                                    std::vector<Entry> entries, bool real_valued = false);

  /// Inserts or overwrites. DomainError if the index has the wrong dimension
  /// or lies outside the truncation.
  void set(const MultiIndex& n, Complex value);
  /// Coefficient at n, zero when absent.
  [[nodiscard]] Complex get(const MultiIndex& n) const;

  [[nodiscard]] std::size_t dim() const { return dim_; }
  [[nodiscard]] std::int64_t truncation_radius_sq() const { return truncation_; }
  [[nodiscard]] bool real_valued() const { return real_valued_; }
  void set_real_valued(bool v) { real_valued_ = v; }
  [[nodiscard]] const std::vector<Entry>& entries() const { return entries_; }
  [[nodiscard]] std::size_t size() const { return entries_.size(); }
  [[nodiscard]] bool empty() const { return entries_.empty(); }

  /// Largest |n_i| over stored entries (0 when empty).
  [[nodiscard]] std::int64_t max_abs_component() const;
  /// max over stored n of |c_{-n} - conj(c_n)|.
  [[nodiscard]] double hermitian_defect() const;
  /// Entries with |n|^2 < k, same flags, truncation min(k, current).
  [[nodiscard]] SpectralField truncated(std::int64_t k) const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator*=(Complex s);

 private:
  std::size_t dim_ = 1;
  std::int64_t truncation_ = 1;
  bool real_valued_ = false;
  std::vector<Entry> entries_;
};

/// Complex samples at x_j = -pi + 2 pi j / M per axis, row-major with axis 0 slowest.
class GridField {
 public:
  GridField() = default;
  /// M must be odd and >= 3.
  GridField(std::size_t dim, std::size_t points_per_axis);

  static GridField from_function(std::size_t dim, std::size_t points_per_axis,
                                 const std::function<Complex(std::span<const double>)>& f);

  [[nodiscard]] std::size_t dim() const { return dim_; }
  [[nodiscard]] std::size_t points_per_axis() const { return m_; }
  [[nodiscard]] std::size_t size() const { return samples_.size(); }
  [[nodiscard]] const std::vector<Complex>& samples() const { return samples_; }
  [[nodiscard]] std::vector<Complex>& samples() { return samples_; }
  [[nodiscard]] Complex& operator[](std::size_t i) { return samples_[i]; }
  [[nodiscard]] const Complex& operator[](std::size_t i) const { return samples_[i]; }

  /// Coordinate of grid index j along any axis.
  [[nodiscard]] double coordinate(std::size_t j) const;
  /// Coordinates of the flat sample index.
  [[nodiscard]] std::vector<double> point(std::size_t flat) const;
  [[nodiscard]] double sup_norm() const;
  /// True when every sample has zero imaginary part.
  [[nodiscard]] bool is_real() const;

 private:
  std::size_t dim_ = 1;
  std::size_t m_ = 3;
  std::vector<Complex> samples_;
};

/// Derivative multi-index alpha with |alpha| <= 2.
struct DerivMultiIndex {
  std::vector<int> alpha;

  [[nodiscard]] int order() const;
  /// DomainError unless alpha has N nonnegative entries summing to at most 2.
  void validate(std::size_t dim) const;
};

/// All n in Z^N with |n|^2 < k, in lexicographic order.
std::vector<MultiIndex> lattice_points(std::size_t dim, std::int64_t k);

/// Trapezoidal coefficients for every |n|^2 < k. AliasError when the box
/// radius floor(sqrt(k - 1)) exceeds (M - 1) / 2.
SpectralField analyze(const GridField& g, std::int64_t truncation_radius_sq);

/// Samples of sum_n c_n e^{i n.x}, real parts only when c is real_valued.
/// AliasError when a stored |n_i| exceeds (M - 1) / 2.
GridField synthesize(const SpectralField& c, std::size_t points_per_axis);

/// sum_n (1 + |n|^2)^a |c_n|^2 over stored entries.
double liouville_norm_sq(const SpectralField& c, double a);

/// S(k) = sum_{|n| <= k} (1 + |n|^2)^a |c_n|^2 for each radius k (nondecreasing radii).
std::vector<double> liouville_partial_sums(const SpectralField& c, double a,
                                           std::span<const std::int64_t> radii);

/// Stabilization test on partial sums at geometric checkpoints: true when the
/// last increment is below rel_threshold * S or smaller than the one before it.
/// Logarithmic divergence keeps the increments constant and fails both.
bool partial_sums_stabilize(std::span<const double> sums, double rel_threshold = 1e-3);

/// Entrywise |n|^{2 tau} c_n; tau = 0 is the identity. ZeroModeError if
/// tau < 0 and c_0 != 0.
SpectralField apply_fractional_power(const SpectralField& c, double tau);

/// max over fields of ||D^alpha (A + 1)^{-sigma} g||_C / ||g||_{L2}, the sup
/// taken on a 4x oversampled grid. HypothesisError if sigma <= 1 + N / 4.
double embedding_constant(std::span<const SpectralField> samples, double sigma,
                          const DerivMultiIndex& alpha);

}  // namespace fracspec
