#include "fracspec/counterexample.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fracspec/errors.hpp"
#include "fracspec/mlf.hpp"
#include "fracspec/numeric/double_double.hpp"
#include "fracspec/numeric/gamma.hpp"

namespace fracspec {

namespace {

struct KahanSum {
  double s = 0.0;
  double c = 0.0;
  void add(double x) {
    const double y = x - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
};

// |phi_n| + |phi_{-n}| indexed by n = 0..k_max.
std::vector<double> pair_moduli(const HLDatum& datum) {
  std::vector<double> m(static_cast<std::size_t>(datum.k_max) + 1, 0.0);
  for (const auto& e : datum.coefficients.entries()) {
    const std::int64_t n = std::abs(e.index.n[0]);
    if (n <= datum.k_max) m[static_cast<std::size_t>(n)] += std::abs(e.value);
  }
  return m;
}

void check_checkpoints(std::span<const std::int64_t> checkpoints, std::int64_t lo, std::int64_t hi) {
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < lo || checkpoints[i] > hi) {
      throw DomainError("checkpoint " + std::to_string(checkpoints[i]) + " outside [" +
                        std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    if (i > 0 && checkpoints[i] < checkpoints[i - 1]) throw DomainError("checkpoints must be sorted");
  }
}

}  // namespace

HLDatum hl_coefficients(std::int64_t k_max) {
  if (k_max < 2) throw DomainError("Hardy-Littlewood truncation needs k_max >= 2");
  HLDatum d;
  d.k_max = k_max;
  std::vector<SpectralField::Entry> entries;
  entries.reserve(2 * static_cast<std::size_t>(k_max));
  for (std::int64_t n = 1; n <= k_max; ++n) {
    const auto nd = static_cast<double>(n);
    const numeric::DoubleDouble phase = numeric::reduce_two_pi(nd * numeric::log(nd));
    const double theta = phase.to_double();
    const double mod = 0.5 / nd;
    const Complex v = {mod * std::cos(theta), mod * std::sin(theta)};
    entries.push_back({MultiIndex{n}, v});
    entries.push_back({MultiIndex{-n}, std::conj(v)});
  }
  d.coefficients = SpectralField::from_entries(1, k_max * k_max + 1, std::move(entries), true);
  return d;
}

std::vector<double> abs_coeff_partial_sums(const HLDatum& datum,
                                           std::span<const std::int64_t> checkpoints) {
  check_checkpoints(checkpoints, 0, datum.k_max);
  const std::vector<double> m = pair_moduli(datum);
  std::vector<double> out;
  out.reserve(checkpoints.size());
  KahanSum acc;
  std::int64_t n = 0;
  for (const std::int64_t k : checkpoints) {
    while (n < k) acc.add(m[static_cast<std::size_t>(++n)]);
    out.push_back(acc.s);
  }
  return out;
}

GrowthFit divergence_sum(const HLDatum& datum, double rho, double t, std::int64_t k0,
                         std::span<const std::int64_t> checkpoints) {
  if (!(rho > 0.0 && rho < 1.0)) throw DomainError("growth law requires rho in (0, 1)");
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("growth law requires t > 0");
  const double t_rho = std::pow(t, rho);
  if (k0 < 1 || static_cast<double>(k0) * static_cast<double>(k0) * t_rho < 50.0) {
    throw DomainError("growth law requires k0^2 t^rho >= 50");
  }
  check_checkpoints(checkpoints, k0, datum.k_max);
  if (checkpoints.size() < 2 || checkpoints.front() == checkpoints.back()) {
    throw DomainError("growth fit needs at least two distinct checkpoints");
  }

  const std::vector<double> m = pair_moduli(datum);
  const MittagLeffler ml(rho, 1.0);
  GrowthFit fit;
  fit.rho = rho;
  fit.t = t;
  fit.k0 = k0;
  fit.k.assign(checkpoints.begin(), checkpoints.end());
  KahanSum acc;
  std::int64_t n = k0 - 1;
  for (const std::int64_t k : checkpoints) {
    while (n < k) {
      ++n;
      const double nsq = static_cast<double>(n) * static_cast<double>(n);
      acc.add(m[static_cast<std::size_t>(n)] * nsq * ml(nsq * t_rho));
    }
    fit.U.push_back(acc.s);
  }

  const auto count = static_cast<double>(fit.k.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < fit.k.size(); ++i) {
    mx += std::log(static_cast<double>(fit.k[i]));
    my += fit.U[i];
  }
  mx /= count;
  my /= count;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < fit.k.size(); ++i) {
    const double dx = std::log(static_cast<double>(fit.k[i])) - mx;
    sxy += dx * (fit.U[i] - my);
    sxx += dx * dx;
  }
  fit.fitted_slope = sxy / sxx;
  fit.intercept = my - fit.fitted_slope * mx;
  fit.predicted_slope = numeric::rgamma(1.0 - rho) / t_rho;
  fit.relative_slope_error = std::fabs(fit.fitted_slope - fit.predicted_slope) / fit.predicted_slope;
  return fit;
}

double holder_constant(const SpectralField& field, std::size_t grid_M, double exponent) {
  if (!(exponent > 0.0 && exponent <= 1.0)) throw DomainError("Hoelder exponent must lie in (0, 1]");
  if (field.dim() != 1) throw DomainError("Hoelder scan is defined on T^1");
  const GridField g = synthesize(field, grid_M);
  const std::size_t m = g.points_per_axis();
  const double h = 2.0 * std::numbers::pi / static_cast<double>(m);
  double best = 0.0;
  for (std::size_t s = 1; 2 * s < m; s *= 2) {
    const double denom = std::pow(h * static_cast<double>(s), exponent);
    double top = 0.0;
    for (std::size_t j = 0; j < m; ++j) top = std::max(top, std::abs(g[(j + s) % m] - g[j]));
    best = std::max(best, top / denom);
  }
  return best;
}

double holder_constant(const HLDatum& datum, std::size_t grid_M, double exponent) {
  return holder_constant(datum.coefficients, grid_M, exponent);
}

double critical_exponent(const SpectralField& field, std::span<const double> a_grid,
                         std::span<const std::int64_t> checkpoints) {
  if (a_grid.size() < 2) throw DomainError("critical exponent needs at least two trial exponents");
  for (std::size_t i = 1; i < a_grid.size(); ++i) {
    if (!(a_grid[i] > a_grid[i - 1])) throw DomainError("trial exponents must be ascending");
  }
  if (checkpoints.size() < 3) throw DomainError("critical exponent needs at least 3 checkpoints");
  auto stabilizes = [&](double a) {
    const std::vector<double> s = liouville_partial_sums(field, a, checkpoints);
    return partial_sums_stabilize(s);
  };

  std::vector<bool> conv(a_grid.size());
  for (std::size_t i = 0; i < a_grid.size(); ++i) conv[i] = stabilizes(a_grid[i]);
  if (std::all_of(conv.begin(), conv.end(), [](bool c) { return c; })) {
    return std::numeric_limits<double>::infinity();
  }
  // Expected pattern: stabilizing up to some a, growing beyond.
  const auto first_div = static_cast<std::size_t>(std::find(conv.begin(), conv.end(), false) - conv.begin());
  const bool clean = first_div > 0 && std::none_of(conv.begin() + static_cast<std::ptrdiff_t>(first_div),
                                                    conv.end(), [](bool c) { return c; });
  if (!clean) {
    throw InconclusiveError("trial exponents bracket no stabilizing-to-growing transition");
  }
  double lo = a_grid[first_div - 1];
  double hi = a_grid[first_div];
  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    if (stabilizes(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace fracspec
