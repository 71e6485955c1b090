#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "fracspec/counterexample.hpp"
#include "fracspec/errors.hpp"
#include "fracspec/numeric/gamma.hpp"
#include "oracles/mlf_reference.inc"

using namespace fracspec;

namespace {

std::vector<std::int64_t> log_checkpoints(std::int64_t lo, std::int64_t hi, int count) {
  std::vector<std::int64_t> k;
  for (int i = 0; i < count; ++i) {
    k.push_back(std::llround(double(lo) * std::pow(double(hi) / double(lo), i / double(count - 1))));
  }
  return k;
}

}  // namespace

TEST_CASE("hl_coefficients") {
  const HLDatum d = hl_coefficients(512);
  CHECK(d.coefficients.get({1}) == Complex(0.5));
  CHECK(d.coefficients.hermitian_defect() == 0.0);
  CHECK(d.coefficients.size() == 1024);
  for (std::int64_t n : {2, 37, 512}) {
    const double theta = double(n) * std::log(double(n));
    const Complex want = std::polar(0.5 / double(n), theta);
    CHECK(std::abs(d.coefficients.get({n}) - want) <= 1e-15);
  }
  const SpectralField back = analyze(synthesize(d.coefficients, 1025), 512 * 512 + 1);
  double err = 0.0;
  for (const auto& e : d.coefficients.entries()) err = std::max(err, std::abs(back.get(e.index) - e.value));
  CHECK(err <= 1e-12);
  CHECK_THROWS_AS((void)hl_coefficients(1), DomainError);
}

TEST_CASE("abs_coeff_partial_sums") {
  const HLDatum d = hl_coefficients(20000);
  const std::vector<std::int64_t> k{1, 1000, 2000, 10000, 20000};
  const std::vector<double> s = abs_coeff_partial_sums(d, k);
  CHECK(s[0] == 1.0);
  CHECK(std::fabs(s[3] - 9.7876) <= 1e-3);
  CHECK(std::fabs(s[3] - kHarmonic1e4) <= 1e-12);
  CHECK(std::fabs(s[2] - s[1] - std::numbers::ln2) <= 1e-3);
  CHECK(std::fabs(s[4] - s[3] - std::numbers::ln2) <= 1e-3);
  const std::vector<std::int64_t> outside{20001};
  CHECK_THROWS_AS((void)abs_coeff_partial_sums(d, outside), DomainError);
  const std::vector<std::int64_t> unsorted{5, 3};
  CHECK_THROWS_AS((void)abs_coeff_partial_sums(d, unsorted), DomainError);
}

TEST_CASE("divergence_sum: growth law") {
  const HLDatum d = hl_coefficients(100000);
  const std::vector<std::int64_t> k = log_checkpoints(1000, 100000, 21);
  const GrowthFit a = divergence_sum(d, 0.5, 1.0, 8, k);
  CHECK(a.fitted_slope == doctest::Approx(1.0 / std::sqrt(std::numbers::pi)).epsilon(0.05));
  CHECK(a.predicted_slope == doctest::Approx(0.5641895835).epsilon(1e-9));
  CHECK(a.relative_slope_error <= 0.05);
  CHECK(a.U.size() == k.size());
  for (std::size_t i = 1; i < a.U.size(); ++i) CHECK(a.U[i] > a.U[i - 1]);

  const GrowthFit b = divergence_sum(d, 0.5, 4.0, 8, k);
  CHECK(b.fitted_slope / a.fitted_slope == doctest::Approx(0.5).epsilon(0.05));

  const GrowthFit c = divergence_sum(d, 0.3, 1.0, 8, k);
  CHECK(c.relative_slope_error <= 0.05);
  CHECK(c.predicted_slope == doctest::Approx(numeric::rgamma(0.7)).epsilon(1e-12));
}

TEST_CASE("divergence_sum: domain") {
  const HLDatum d = hl_coefficients(1000);
  const std::vector<std::int64_t> k{100, 1000};
  CHECK_THROWS_AS((void)divergence_sum(d, 1.0, 1.0, 8, k), DomainError);
  CHECK_THROWS_AS((void)divergence_sum(d, 0.5, 0.0, 8, k), DomainError);
  CHECK_THROWS_AS((void)divergence_sum(d, 0.5, 1.0, 7, k), DomainError);
  const std::vector<std::int64_t> early{4, 1000};
  CHECK_THROWS_AS((void)divergence_sum(d, 0.5, 1.0, 8, early), DomainError);
  const std::vector<std::int64_t> single{1000};
  CHECK_THROWS_AS((void)divergence_sum(d, 0.5, 1.0, 8, single), DomainError);
}

TEST_CASE("holder_constant") {
  SpectralField cosx(1, 2, true);
  cosx.set({1}, 0.5);
  cosx.set({-1}, 0.5);
  // |cos x - cos y| <= |x - y|, nearly attained at the smallest stride.
  const double lip = holder_constant(cosx, 1025, 1.0);
  CHECK(lip <= 1.0);
  CHECK(lip >= 0.99);

  // Hoelder-1/2 constants stay bounded under refinement; Lipschitz ones grow.
  const double h_small = holder_constant(hl_coefficients(256), 513, 0.5);
  const double h_large = holder_constant(hl_coefficients(2048), 4097, 0.5);
  CHECK(h_large < 1.5 * h_small);
  const double l_small = holder_constant(hl_coefficients(256), 513, 1.0);
  const double l_large = holder_constant(hl_coefficients(2048), 4097, 1.0);
  CHECK(l_large > 2.0 * l_small);
  CHECK_THROWS_AS((void)holder_constant(cosx, 1025, 0.0), DomainError);
  CHECK_THROWS_AS((void)holder_constant(cosx, 1025, 1.5), DomainError);
}

TEST_CASE("critical_exponent") {
  std::vector<double> grid;
  for (double a = 0.0; a <= 4.0; a += 0.25) grid.push_back(a);
  const std::vector<std::int64_t> radii{1000, 10000, 100000};
  const HLDatum hl = hl_coefficients(100000);
  CHECK(critical_exponent(hl.coefficients, grid, radii) == doctest::Approx(0.5).epsilon(0.1));

  std::vector<SpectralField::Entry> entries;
  for (std::int64_t n = 1; n <= 100000; ++n) {
    entries.push_back({MultiIndex{n}, 1.0 / double(n * n)});
    entries.push_back({MultiIndex{-n}, 1.0 / double(n * n)});
  }
  const SpectralField inv_sq =
      SpectralField::from_entries(1, std::int64_t(100000) * 100000 + 1, std::move(entries), true);
  CHECK(std::fabs(critical_exponent(inv_sq, grid, radii) - 1.5) <= 0.05);

  SpectralField finite(1, 10, true);
  finite.set({2}, 1.0);
  CHECK(critical_exponent(finite, grid, radii) == std::numeric_limits<double>::infinity());

  const std::vector<double> high{2.0, 3.0};
  CHECK_THROWS_AS((void)critical_exponent(inv_sq, high, radii), InconclusiveError);
  const std::vector<double> descending{1.0, 0.5};
  CHECK_THROWS_AS((void)critical_exponent(inv_sq, descending, radii), DomainError);
}
