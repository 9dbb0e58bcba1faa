#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "ibssd/bessel.hpp"
#include "ibssd/spectral.hpp"
#include "quadrature.hpp"

using namespace ibssd;

TEST_CASE("K0, K1, K2 against the cosh integral") {
  for (double x : {1e-6, 1e-3, 0.1, 0.5, 1.0, 1.9, 2.0, 2.1, 3.0, 7.5, 20.0, 80.0, 300.0, 699.0}) {
    for (int nu = 0; nu <= 2; ++nu) {
      const double ref = oracle::bessel_k_integral(nu, x);
      CHECK(std::abs(bessel_k(nu, x) - ref) <= 1e-10 * ref);
    }
  }
}

TEST_CASE("reference values") {
  CHECK(bessel_k0(1.0) == doctest::Approx(0.4210244382).epsilon(1e-10));
  CHECK(bessel_k(2, 1.0) == doctest::Approx(1.6248388986).epsilon(1e-10));
  const double asym = std::sqrt(kPi / 100.0) * std::exp(-50.0);
  CHECK(std::abs(bessel_k0(50.0) / asym - 1.0) < 0.01);
  CHECK(bessel_k0(800.0) == 0.0);
}

TEST_CASE("domain errors") {
  for (double x : {0.0, -1.0}) {
    try {
      bessel_k0(x);
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::domain);
    }
  }
  CHECK_THROWS_AS(bessel_k(3, 1.0), Error);
  CHECK_THROWS_AS(k0_convolution_symbol(0.0, 1.0), Error);
}

TEST_CASE("recurrence identity") {
  for (double x = 0.01; x <= 100.0; x *= 1.3) {
    const double k2 = bessel_k(2, x);
    CHECK(std::abs(k2 - bessel_k0(x) - 2.0 * bessel_k1(x) / x) <= 1e-9 * k2);
  }
}

TEST_CASE("K0 convolution symbol") {
  CHECK(k0_convolution_symbol(1.0, 0) == 1.0);
  CHECK(k0_convolution_symbol(3.0, 4) == doctest::Approx(0.2).epsilon(1e-15));
  for (int k = 0; k < 10; ++k) {
    CHECK(k0_convolution_symbol(1.5, k + 1) < k0_convolution_symbol(1.5, k));
    CHECK(k0_convolution_symbol(1.6, k) < k0_convolution_symbol(1.5, k));
  }

  // (1/pi) int_R K0(beta|a - a'|) cos(2a') da' = cos(2a) (2/pi) int_0^inf K0(beta u) cos(2u) du
  const double beta = 1.0;
  double integral = 0.0;
  for (double a = 0.0; a < 40.0; a += 1.0) {
    integral += oracle::tanh_sinh(
        [&](double u, double, double) { return bessel_k0(beta * u) * std::cos(2.0 * u); }, a, a + 1.0);
  }
  const Eigen::Index n = 64;
  const Vec alpha = Vec::LinSpaced(n, 0.0, kTwoPi - kTwoPi / n);
  const Vec f = (2.0 * alpha.array()).cos();
  const Vec spectral = apply_symbol_1d(f, [&](double k) { return k0_convolution_symbol(beta, k); });
  CHECK((spectral - (2.0 / kPi) * integral * f).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("unsteady kernel G") {
  const Mat2 g1 = unsteady_kernel_G(Vec2(1.0, 0.0), 50.0);
  CHECK(g1(0, 1) == 0.0);
  CHECK(g1(1, 0) == 0.0);
  CHECK(g1(0, 0) == doctest::Approx(-1.0 + 0.5 * 2500.0 * (oracle::bessel_k_integral(0, 50) + oracle::bessel_k_integral(2, 50))).epsilon(1e-9));
  CHECK(g1(1, 1) == doctest::Approx(1.0 - 50.0 * oracle::bessel_k_integral(1, 50)).epsilon(1e-12));

  const Vec2 r(0.3, 0.4);
  const Mat2 a = unsteady_kernel_G(r, 2.0);
  const Mat2 b = unsteady_kernel_G(-r, 2.0);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a(0, 1) == doctest::Approx(a(1, 0)).epsilon(1e-15));

  // r = (0.5, 0), lambda = 2, z = 1 with quadrature Bessel values.
  const double k0 = oracle::bessel_k_integral(0, 1.0);
  const double k1 = oracle::bessel_k_integral(1, 1.0);
  const double k2 = oracle::bessel_k_integral(2, 1.0);
  const Mat2 g = unsteady_kernel_G(Vec2(0.5, 0.0), 2.0);
  const double g11 = 1.0 / 0.25 - 2.0 / 0.25 + 0.5 * 4.0 * (k0 + k2) - 2.0 * k1 * (1.0 / 0.5 - 1.0 / 0.5);
  const double g22 = 1.0 / 0.25 - 2.0 * k1 / 0.5;
  CHECK(g(0, 0) == doctest::Approx(g11).epsilon(1e-10));
  CHECK(g(1, 1) == doctest::Approx(g22).epsilon(1e-10));
  CHECK(g(0, 1) == 0.0);

  // Far beyond the underflow threshold only the algebraic part survives.
  const Mat2 far = unsteady_kernel_G(Vec2(0.0, 2.0), 1000.0);
  CHECK(far(0, 0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(far(1, 1) == doctest::Approx(0.25 - 2.0 * 4.0 / 16.0).epsilon(1e-15));

  try {
    unsteady_kernel_G(Vec2::Zero(), 1.0);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::singular_point);
  }
}

namespace {

SsdSymbolParams symbol_params(double mu, double dt, double s_min, double excess) {
  SsdSymbolParams p;
  p.S_b = 1.0;
  p.mu = mu;
  p.rho = 1.0;
  p.dt = dt;
  p.lambda = std::sqrt(p.rho / (mu * dt));
  p.s_min = s_min;
  p.s_max_excess = excess;
  p.gamma = 1.0 - 1.0 / (1.0 + excess);
  return p;
}

}  // namespace

TEST_CASE("SSD symbols vanish at k = 0 and have the expected sign") {
  const auto p = symbol_params(0.01, 0.1, 1.2, 0.6);
  CHECK(ssd_symbol_T(0, p) == 0.0);
  CHECK(ssd_symbol_S(0, p) == 0.0);
  CHECK(ssd_symbol_second_order(0, p).T == 0.0);
  CHECK(ssd_symbol_second_order(0, p).S == 0.0);
  for (int k = 1; k <= 256; ++k) {
    CHECK(ssd_symbol_T(k, p) < 0.0);
    CHECK(ssd_symbol_S(k, p) < 0.0);
    CHECK(ssd_symbol_T(-k, p) == ssd_symbol_T(k, p));
    CHECK(ssd_symbol_S(-k, p) == ssd_symbol_S(k, p));
  }
  auto q = p;
  q.s_max_excess = -0.2;
  CHECK(ssd_symbol_S(3, q) > 0.0);
}

TEST_CASE("SSD symbol asymptotics") {
  const double dt = 0.1;
  const auto big = symbol_params(1e4, dt, 1.0, 0.5);
  const auto small = symbol_params(1e-6, dt, 1.0, 0.5);
  for (int k = 1; k <= 8; ++k) {
    const double steady_T = -(1.0 / (4.0 * 1e4)) * k;
    CHECK(std::abs(ssd_symbol_T(k, big) / steady_T - 1.0) < 0.01);
    CHECK(std::abs(ssd_symbol_S(k, big) / (0.5 * steady_T) - 1.0) < 0.01);
    const double inviscid_T = -std::sqrt(dt) / (2.0 * std::sqrt(1e-6)) * k * k;
    CHECK(std::abs(ssd_symbol_T(k, small) / inviscid_T - 1.0) < 0.01);

    const double beta = small.lambda * small.s_min;
    const double direct = -(dt * 0.5 / 2.0) * (std::pow(k, 3) - std::pow(k, 4) / std::sqrt(beta * beta + k * k));
    CHECK(ssd_symbol_S(k, small) == doctest::Approx(direct).epsilon(1e-8));
  }
}

TEST_CASE("second order symbols relate to first order ones") {
  const auto p = symbol_params(0.01, 0.05, 1.3, 0.4);
  auto half = p;
  half.dt = 0.5 * p.dt;
  half.lambda = std::sqrt(p.rho / (p.mu * half.dt));
  const auto pair = ssd_symbol_second_order(4, p);
  CHECK(pair.T == doctest::Approx(ssd_symbol_T(4, half)).epsilon(1e-14));
  CHECK(pair.S == doctest::Approx(ssd_symbol_S(4, half) / p.s_min).epsilon(1e-14));

  // Doubling s_min at fixed lambda*s_min scales the S prefactor by 1/8.
  auto doubled = p;
  doubled.s_min = 2.0 * p.s_min;
  doubled.lambda = 0.5 * p.lambda;
  CHECK(ssd_symbol_second_order(4, doubled).S == doctest::Approx(pair.S / 8.0).epsilon(1e-14));
  CHECK(ssd_symbol_second_order(4, doubled).T == doctest::Approx(pair.T / 4.0).epsilon(1e-14));
}

TEST_CASE("parameter construction") {
  Vec s(4);
  s << 1.2, 1.6, 1.4, 1.3;
  const auto p = make_ssd_params(1.0, 0.01, 1.0, 0.5, s);
  CHECK(p.lambda == doctest::Approx(std::sqrt(200.0)));
  CHECK(p.s_min == 1.2);
  CHECK(p.s_max_excess == doctest::Approx(0.6));
  CHECK(p.gamma == doctest::Approx(1.0 - 1.0 / 1.6));
  CHECK_THROWS_AS(make_ssd_params(1.0, 0.0, 1.0, 0.5, s), Error);
  s(0) = -0.1;
  CHECK_THROWS_AS(make_ssd_params(1.0, 1.0, 1.0, 0.5, s), Error);
}
