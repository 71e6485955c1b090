#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "fracspec/counterexample.hpp"
#include "fracspec/errors.hpp"
#include "fracspec/spectra.hpp"

using namespace fracspec;

namespace {

constexpr double kPi = std::numbers::pi;

SpectralField random_field(std::size_t dim, std::int64_t k, std::size_t count, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::vector<MultiIndex> pts = lattice_points(dim, k);
  std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
  SpectralField f(dim, k);
  for (std::size_t i = 0; i < count; ++i) f.set(pts[pick(rng)], {u(rng), u(rng)});
  return f;
}

double max_coeff_diff(const SpectralField& a, const SpectralField& b) {
  double d = 0.0;
  for (const auto& e : a.entries()) d = std::max(d, std::abs(e.value - b.get(e.index)));
  for (const auto& e : b.entries()) d = std::max(d, std::abs(e.value - a.get(e.index)));
  return d;
}

}  // namespace

TEST_CASE("analyze: listed examples") {
  const GridField c = GridField::from_function(1, 9, [](std::span<const double> x) { return Complex(std::cos(x[0])); });
  const SpectralField a = analyze(c, 17);
  for (const auto& e : a.entries()) {
    const double want = std::abs(e.index.n[0]) == 1 ? 0.5 : 0.0;
    CHECK(std::abs(e.value - want) <= 1e-14);
  }
  const GridField one = GridField::from_function(2, 7, [](std::span<const double>) { return Complex(1.0); });
  const SpectralField b = analyze(one, 10);
  CHECK(std::abs(b.get({0, 0}) - 1.0) <= 1e-14);
  for (const auto& e : b.entries()) {
    if (e.index != MultiIndex{0, 0}) CHECK(std::abs(e.value) <= 1e-14);
  }
}

TEST_CASE("synthesize: listed examples") {
  SpectralField c(1, 4);
  c.set({0}, 1.0);
  const GridField flat = synthesize(c, 11);
  for (const Complex& v : flat.samples()) CHECK(std::abs(v - 1.0) <= 1e-15);
  SpectralField cosx(1, 4);
  cosx.set({1}, 0.5);
  cosx.set({-1}, 0.5);
  const GridField g = synthesize(cosx, 11);
  for (std::size_t j = 0; j < g.size(); ++j) CHECK(std::abs(g[j] - std::cos(g.coordinate(j))) <= 1e-14);
  CHECK(g.coordinate(0) == doctest::Approx(-kPi));
}

TEST_CASE("spectra: randomized roundtrip and Parseval") {
  std::mt19937_64 rng(2024);
  for (std::size_t dim = 1; dim <= 3; ++dim) {
    const std::int64_t k = dim == 3 ? 10 : 26;
    const std::size_t M = dim == 3 ? 9 : 13;
    for (int rep = 0; rep < 20; ++rep) {
      const SpectralField c = random_field(dim, k, 20, rng);
      const GridField g = synthesize(c, M);
      CHECK(max_coeff_diff(analyze(g, k), c) <= 1e-12);
      double grid = 0.0, coeffs = 0.0;
      for (const Complex& v : g.samples()) grid += std::norm(v);
      grid *= std::pow(2 * kPi / double(M), double(dim));
      for (const auto& e : c.entries()) coeffs += std::norm(e.value);
      CHECK(grid / coeffs == doctest::Approx(std::pow(2 * kPi, double(dim))).epsilon(1e-12));
    }
  }
}

TEST_CASE("spectra: alias guards") {
  SpectralField c(1, 50);
  c.set({7}, 1.0);
  CHECK_THROWS_AS((void)synthesize(c, 13), AliasError);
  CHECK_NOTHROW((void)synthesize(c, 15));
  const GridField g(1, 13);
  CHECK_THROWS_AS((void)analyze(g, 50), AliasError);
  CHECK_NOTHROW((void)analyze(g, 37));
  CHECK_THROWS_AS(GridField(1, 8), DomainError);
}

TEST_CASE("SpectralField containers") {
  SpectralField c(2, 5);
  CHECK_THROWS_AS(c.set({2, 1}, 1.0), DomainError);
  CHECK_THROWS_AS(c.set({1}, 1.0), DomainError);
  c.set({1, 1}, {1.0, 2.0});
  c.set({-1, -1}, {1.0, -2.0});
  CHECK(c.hermitian_defect() == 0.0);
  CHECK(c.get({0, 1}) == Complex(0.0));
  CHECK(c.truncated(2).empty());
  const SpectralField d = SpectralField::from_entries(1, 3, {{{1}, 1.0}, {{1}, 2.0}, {{-1}, 0.5}});
  CHECK(d.size() == 2);
  CHECK(d.get({1}) == Complex(3.0));
  CHECK(d.entries().front().index == MultiIndex{-1});
  CHECK(lattice_points(2, 2).size() == 5);
  CHECK(lattice_points(3, 2).size() == 7);
}

TEST_CASE("liouville_norm_sq") {
  SpectralField c(1, 2);
  c.set({1}, 0.5);
  c.set({-1}, 0.5);
  CHECK(liouville_norm_sq(c, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  SpectralField z(3, 1);
  z.set({0, 0, 0}, 3.0);
  CHECK(liouville_norm_sq(z, 0.7) == doctest::Approx(9.0));
  CHECK(liouville_norm_sq(z, -2.5) == doctest::Approx(9.0));
}

TEST_CASE("liouville partial sums of the Hardy-Littlewood datum") {
  const HLDatum hl = hl_coefficients(100000);
  const std::vector<std::int64_t> radii{1000, 10000, 100000};
  const std::vector<double> s4 = liouville_partial_sums(hl.coefficients, 0.4, radii);
  const std::vector<double> s5 = liouville_partial_sums(hl.coefficients, 0.5, radii);
  CHECK(partial_sums_stabilize(s4));
  CHECK_FALSE(partial_sums_stabilize(s5));
  // Each sign contributes (1/4) ln k, so a decade adds (1/2) ln 10.
  CHECK(s5[2] - s5[1] == doctest::Approx(0.5 * std::log(10.0)).epsilon(1e-3));
  CHECK(s5[1] - s5[0] == doctest::Approx(0.5 * std::log(10.0)).epsilon(1e-3));
  CHECK_THROWS_AS((void)partial_sums_stabilize(std::vector<double>{1.0, 2.0}), DomainError);
}

TEST_CASE("apply_fractional_power") {
  SpectralField c(1, 10);
  c.set({2}, 1.0);
  CHECK(apply_fractional_power(c, 1.0).get({2}) == Complex(4.0));
  std::mt19937_64 rng(3);
  SpectralField r = random_field(2, 30, 25, rng);
  r.set({0, 0}, 0.0);
  CHECK(max_coeff_diff(apply_fractional_power(r, 0.0), r) == 0.0);
  const SpectralField back = apply_fractional_power(apply_fractional_power(r, -1.0), 1.0);
  CHECK(max_coeff_diff(back, r) <= 1e-14);
  SpectralField with_mean = r;
  with_mean.set({0, 0}, 1.0);
  CHECK_THROWS_AS((void)apply_fractional_power(with_mean, -0.5), ZeroModeError);
  CHECK_NOTHROW((void)apply_fractional_power(with_mean, 0.5));
}

TEST_CASE("embedding_constant") {
  const DerivMultiIndex none{{0}};
  SpectralField one(1, 10);
  one.set({3}, 1.0);
  const std::vector<SpectralField> single{one};
  const double sigma = 1.4;
  CHECK(embedding_constant(single, sigma, none) ==
        doctest::Approx(std::pow(10.0, -sigma) / std::sqrt(2 * kPi)).epsilon(1e-12));
  // alpha = 2 multiplies the single mode by n^2 = 9.
  CHECK(embedding_constant(single, sigma, DerivMultiIndex{{2}}) ==
        doctest::Approx(9.0 * std::pow(10.0, -sigma) / std::sqrt(2 * kPi)).epsilon(1e-12));

  std::mt19937_64 rng(11);
  std::vector<double> values;
  for (std::int64_t k : {101, 1001}) {
    std::vector<SpectralField> ensemble;
    for (int i = 0; i < 100; ++i) ensemble.push_back(random_field(1, k, 30, rng));
    const double v = embedding_constant(ensemble, 1.3, DerivMultiIndex{{2}});
    CHECK(std::isfinite(v));
    values.push_back(v);
    CHECK_THROWS_AS((void)embedding_constant(ensemble, 1.25, none), HypothesisError);
  }
  CHECK(values[1] < 2.0 * values[0]);
  CHECK(values[0] < 2.0 * values[1]);
}

TEST_CASE("DerivMultiIndex") {
  const DerivMultiIndex mixed{{1, 1}};
  const DerivMultiIndex third{{2, 1}};
  const DerivMultiIndex short_alpha{{1}};
  const DerivMultiIndex negative{{-1, 1}};
  CHECK(mixed.order() == 2);
  CHECK_NOTHROW(mixed.validate(2));
  CHECK_THROWS_AS(third.validate(2), DomainError);
  CHECK_THROWS_AS(short_alpha.validate(2), DomainError);
  CHECK_THROWS_AS(negative.validate(2), DomainError);
}
