#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "fracspec/errors.hpp"
#include "fracspec/mlf.hpp"
#include "fracspec/modal.hpp"
#include "fracspec/numeric/gamma.hpp"

using namespace fracspec;

namespace {

double E(double rho, double s) { return mlf_neg({rho, 1.0}, s).value; }

}  // namespace

TEST_CASE("TimeProfile kinds") {
  CHECK(TimeProfile()(3.0) == 0.0);
  CHECK(TimeProfile().is_zero());
  CHECK(TimeProfile::constant(2.5)(7.0) == 2.5);
  CHECK(TimeProfile::polynomial({1.0, 0.0, 2.0})(3.0) == 19.0);
  CHECK(TimeProfile::cosine(2.0, 0.5)(1.0) == doctest::Approx(std::cos(2.5)));
  CHECK(TimeProfile::exponential(-1.0)(2.0) == doctest::Approx(std::exp(-2.0)));
  const TimeProfile s = TimeProfile::sampled({0.0, 1.0, 3.0}, {0.0, 2.0, -2.0});
  CHECK(s(0.5) == doctest::Approx(1.0));
  CHECK(s(2.0) == doctest::Approx(0.0));
  CHECK_THROWS_AS((void)s(3.5), DomainError);
  CHECK(s.sup_abs(3.0) == doctest::Approx(2.0));
  CHECK_THROWS_AS((void)TimeProfile::sampled({0.0, 0.0}, {1.0, 2.0}), DomainError);
  CHECK(TimeProfile::constant(0.0).is_zero());
  CHECK_FALSE(TimeProfile::cosine(1.0).is_zero());

  ModeForcing f;
  CHECK(f.is_zero());
  f.add({0.0, 2.0}, TimeProfile::constant(1.0));
  f.add(1.0, TimeProfile::polynomial({0.0, 1.0}));
  CHECK(f(2.0) == Complex(2.0, 2.0));
  CHECK_FALSE(f.is_zero());
}

TEST_CASE("GradedMesh") {
  CHECK(GradedMesh::for_order(0.5, 1.0, 8).r == 4.0);
  CHECK(GradedMesh::for_order(0.8, 1.0, 8).r == doctest::Approx(2.5));
  CHECK(GradedMesh::for_order(1.0, 1.0, 8).r == 2.0);
  CHECK(GradedMesh::for_order(0.1, 1.0, 8).r == 4.0);
  const GradedMesh m{2.0, 4, 2.0};
  CHECK(m.node(0) == 0.0);
  CHECK(m.node(2) == doctest::Approx(0.5));
  CHECK(m.nodes().back() == 2.0);
  CHECK_THROWS_AS((GradedMesh{1.0, 0, 1.0}.validate()), DomainError);
  CHECK_THROWS_AS((GradedMesh{1.0, 4, 0.5}.validate()), DomainError);
  CHECK_THROWS_AS((GradedMesh{-1.0, 4, 1.0}.validate()), DomainError);
  const std::vector<double> t = uniform_times(2.0, 4);
  CHECK(t == std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0});
}

TEST_CASE("solve_mode: listed examples") {
  const std::vector<double> times = uniform_times(2.0, 20);
  for (double rho : {0.3, 0.5, 0.8}) {
    CAPTURE(rho);
    const GradedMesh mesh = GradedMesh::for_order(rho, 2.0, 64);
    const ModeSolution free = solve_mode(rho, 1.0, 1.0, ModeForcing(), times, mesh);
    for (std::size_t i = 0; i < times.size(); ++i) {
      CHECK(std::abs(free.values[i] - E(rho, std::pow(times[i], rho))) <= 1e-15);
    }
    const double c = 3.0, lambda = 5.0;
    const ModeSolution forced = solve_mode(rho, lambda, 0.0, TimeProfile::constant(c), times, mesh);
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double want = c / lambda * (1.0 - E(rho, lambda * std::pow(times[i], rho)));
      CHECK(std::abs(forced.values[i] - want) <= 1e-12);
    }
    const ModeSolution zero_mode = solve_mode(rho, 0.0, 0.0, TimeProfile::constant(1.0), times, mesh);
    for (std::size_t i = 0; i < times.size(); ++i) {
      CHECK(std::abs(zero_mode.values[i] - std::pow(times[i], rho) * numeric::rgamma(1.0 + rho)) <= 1e-12);
    }
  }
  const std::vector<double> one{1.0};
  const ModeSolution w = solve_mode(0.5, 0.0, 0.0, TimeProfile::constant(1.0), one,
                                    GradedMesh::for_order(0.5, 1.0, 64));
  CHECK(w.values[0].real() == doctest::Approx(1.1283791671).epsilon(1e-10));
}

TEST_CASE("solve_mode: classical limit with an oscillating source") {
  const double lambda = 3.0, omega = 2.0, T = 2.0;
  const Complex phi{0.7, -0.2};
  const std::vector<double> times = uniform_times(T, 10);
  const ModeSolution w =
      solve_mode(1.0, lambda, phi, TimeProfile::cosine(omega), times, GradedMesh::for_order(1.0, T, 64));
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    const double conv =
        (lambda * std::cos(omega * t) + omega * std::sin(omega * t) - lambda * std::exp(-lambda * t)) /
        (lambda * lambda + omega * omega);
    CHECK(std::abs(w.values[i] - (phi * std::exp(-lambda * t) + conv)) <= 1e-8);
  }
  CHECK(w.quadrature_error_est <= 1e-8);
}

TEST_CASE("solve_mode: linearity") {
  const double rho = 0.6, lambda = 2.0, T = 1.0;
  const std::vector<double> times = uniform_times(T, 8);
  const GradedMesh mesh = GradedMesh::for_order(rho, T, 64);
  const ModalOptions tight{1e-10, 12};
  const ModeSolution a = solve_mode(rho, lambda, 1.0, TimeProfile::cosine(3.0), times, mesh, tight);
  const ModeSolution b = solve_mode(rho, lambda, {0.0, 2.0}, TimeProfile::exponential(-0.5), times, mesh, tight);
  ModeForcing both(TimeProfile::cosine(3.0));
  both.add(1.0, TimeProfile::exponential(-0.5));
  const ModeSolution ab = solve_mode(rho, lambda, {1.0, 2.0}, both, times, mesh, tight);
  for (std::size_t i = 0; i < times.size(); ++i) {
    CHECK(std::abs(ab.values[i] - a.values[i] - b.values[i]) <= 1e-9);
  }
}

TEST_CASE("solve_mode: decay bound transfers to the free mode") {
  std::vector<double> grid{0.0};
  for (int i = 0; i < 300; ++i) grid.push_back(1e-6 * std::pow(1e12, i / 299.0));
  for (double rho : {0.3, 0.5, 0.8}) {
    const double C = check_decay_bound({rho, 1.0}, grid);
    const std::vector<double> times = uniform_times(2.0, 64);
    for (double lambda : {1.0, 4.0, 100.0}) {
      const Complex phi{0.6, 0.8};
      const ModeSolution w =
          solve_mode(rho, lambda, phi, ModeForcing(), times, GradedMesh::for_order(rho, 2.0, 8));
      for (std::size_t i = 1; i < times.size(); ++i) {
        CHECK(std::abs(w.values[i]) <= std::abs(phi) * C / (1.0 + lambda * std::pow(times[i], rho)) + 1e-15);
      }
    }
  }
}

TEST_CASE("convolve_kernel") {
  for (std::size_t M : {4, 64}) {
    const GradedMesh mesh = GradedMesh::for_order(0.4, 3.0, M);
    CHECK(std::abs(convolve_kernel(0.4, 2.0, TimeProfile::constant(1.0), 2.0, mesh) -
                   mlf_kernel_primitive(0.4, 2.0, 0.0, 2.0)) <= 1e-15);
  }
  const Complex c = convolve_kernel(1.0, 1.0, TimeProfile::exponential(-1.0), 1.0, GradedMesh::for_order(1.0, 1.0, 512));
  CHECK(std::abs(c - std::exp(-1.0)) <= 1e-6);

  // Second-order self-convergence: successive differences shrink by about 4.
  Complex v[4];
  for (int i = 0; i < 4; ++i) {
    v[i] = convolve_kernel(0.5, 4.0, TimeProfile::cosine(1.0), 1.0, GradedMesh::for_order(0.5, 1.0, 64u << i));
  }
  const double d1 = std::abs(v[1] - v[0]), d2 = std::abs(v[2] - v[1]), d3 = std::abs(v[3] - v[2]);
  CHECK(d2 / d1 <= 0.6);
  CHECK(d3 / d2 <= 0.6);
  CHECK_THROWS_AS((void)convolve_kernel(0.5, 1.0, TimeProfile::constant(1.0), 2.0, GradedMesh{1.0, 8, 1.0}),
                  DomainError);
}

TEST_CASE("caputo_l1") {
  const double dt = 1.0 / 64;
  std::vector<double> c(65, 4.2);
  for (double v : caputo_l1(c, dt, 0.5)) CHECK(v == 0.0);
  std::vector<double> lin(65);
  for (std::size_t j = 0; j < lin.size(); ++j) lin[j] = j * dt;
  const std::vector<double> d = caputo_l1(lin, dt, 0.5);
  CHECK(d[0] == 0.0);
  CHECK(d.back() == doctest::Approx(1.1283791671).epsilon(1e-10));
  for (std::size_t j = 1; j < d.size(); ++j) {
    CHECK(std::fabs(d[j] - std::sqrt(j * dt) * numeric::rgamma(1.5)) <= 1e-13);
  }

  // D^rho E_{rho,1}(-t^rho) = -E_{rho,1}(-t^rho); error at t = 1 under halving.
  std::vector<double> errs;
  for (std::size_t n : {64, 128, 256, 512}) {
    std::vector<double> h(n + 1);
    for (std::size_t j = 0; j <= n; ++j) h[j] = E(0.5, std::sqrt(double(j) / n));
    errs.push_back(std::fabs(caputo_l1(h, 1.0 / n, 0.5).back() + h.back()));
  }
  for (std::size_t i = 1; i < errs.size(); ++i) CHECK(std::log2(errs[i - 1] / errs[i]) >= 1.4);

  std::vector<Complex> z(65);
  for (std::size_t j = 0; j < z.size(); ++j) z[j] = {lin[j], -2.0 * lin[j]};
  const std::vector<Complex> dz = caputo_l1(z, dt, 0.5);
  CHECK(std::abs(dz.back() - Complex(1.0, -2.0) * 1.1283791671) <= 1e-9);
  CHECK_THROWS_AS((void)caputo_l1(lin, dt, 1.0), DomainError);
}

TEST_CASE("riemann_liouville_l1") {
  const double dt = 1.0 / 32;
  std::vector<double> one(129, 1.0);
  CHECK(riemann_liouville_l1_at(one, dt, 0.5, 128) == doctest::Approx(0.2820947918).epsilon(1e-10));
  std::vector<double> lin(33), shifted(33);
  for (std::size_t j = 0; j < lin.size(); ++j) {
    lin[j] = j * dt;
    shifted[j] = lin[j] + 1.0;
  }
  const std::vector<double> rl = riemann_liouville_l1(lin, dt, 0.5);
  const std::vector<double> cap = caputo_l1(lin, dt, 0.5);
  REQUIRE(rl.size() == cap.size() - 1);
  for (std::size_t j = 0; j < rl.size(); ++j) CHECK(rl[j] == cap[j + 1]);
  CHECK(riemann_liouville_l1_at(shifted, dt, 0.5, 32) == doctest::Approx(1.6925687506).epsilon(1e-10));
  CHECK_THROWS_AS((void)riemann_liouville_l1_at(lin, dt, 0.5, 0), DomainError);
}

TEST_CASE("time_derivative_uniform") {
  const double dt = 0.1;
  std::vector<Complex> q(11);
  for (std::size_t j = 0; j < q.size(); ++j) q[j] = 3.0 * std::pow(j * dt, 2) + 1.0;
  const std::vector<Complex> d = time_derivative_uniform(q, dt, 1.0);
  CHECK(d[0] == Complex(0.0));
  CHECK(std::abs(d[1] - Complex(0.3)) <= 1e-13);
  for (std::size_t j = 2; j < d.size(); ++j) CHECK(std::abs(d[j] - Complex(6.0 * j * dt)) <= 1e-12);
  const std::vector<Complex> l1 = time_derivative_uniform(q, dt, 0.5);
  CHECK(l1 == caputo_l1(q, dt, 0.5));
}

TEST_CASE("verify_cauchy") {
  const CauchyReport flat = verify_cauchy(0.5, 0.0, 1.0, ModeForcing(), 1.0 / 64, 1.0);
  CHECK(flat.sup_residual <= 1e-14);
  CHECK(flat.initial_error == 0.0);

  const CauchyReport relax = verify_cauchy(0.5, 1.0, 1.0, ModeForcing(), 1.0 / 256, 1.0);
  CHECK(relax.observed_rate >= 1.0);
  CHECK(relax.sup_residual_half < relax.sup_residual);

  const CauchyReport forced = verify_cauchy(0.7, 2.0, 0.5, TimeProfile::cosine(2.0), 1.0 / 256, 1.0);
  CHECK(forced.observed_rate >= 1.0);

  const CauchyReport zero = verify_cauchy(0.5, 3.0, 0.0, ModeForcing(), 1.0 / 64, 1.0);
  CHECK(zero.sup_residual == 0.0);
  CHECK(zero.sup_residual_half == 0.0);
  CHECK(zero.initial_layer_residual == 0.0);
  CHECK(zero.initial_error == 0.0);
  CHECK(std::isinf(zero.observed_rate));

  CHECK_THROWS_AS((void)verify_cauchy(0.5, 1.0, 1.0, ModeForcing(), 0.3, 1.0), DomainError);
}

TEST_CASE("solve_mode: domain") {
  const std::vector<double> times{0.0, 0.5};
  const GradedMesh mesh{1.0, 8, 1.0};
  CHECK_THROWS_AS((void)solve_mode(1.2, 1.0, 1.0, ModeForcing(), times, mesh), DomainError);
  CHECK_THROWS_AS((void)solve_mode(0.5, -1.0, 1.0, ModeForcing(), times, mesh), DomainError);
  const std::vector<double> late{2.0};
  CHECK_THROWS_AS((void)solve_mode(0.5, 1.0, 1.0, TimeProfile::constant(1.0), late, mesh), DomainError);
  const ModalOptions stingy{1e-14, 0};
  CHECK_THROWS_AS((void)solve_mode(0.5, 1.0, 1.0, TimeProfile::cosine(5.0), times, mesh, stingy),
                  ConvergenceError);
}
