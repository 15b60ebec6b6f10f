#include <doctest.h>

#include <oamfwm/numerics.hpp>

#include "oracles.hpp"

#include <random>

using namespace oamfwm;

namespace {

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an oamfwm::Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_SUITE_BEGIN("numerics");

TEST_CASE("find_root: quadratic and transcendental brackets") {
  const double r = find_root([](double x) { return x * x - 2.0; }, {0.0, 2.0, 1e-14});
  CHECK(r == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
  const double p = find_root([](double x) { return std::sin(x); }, {3.0, 4.0, 1e-14});
  CHECK(std::abs(p - oracle::pi) < 1e-13);
  CHECK(p >= 3.0);
  CHECK(p <= 4.0);
}

TEST_CASE("find_root: error contract") {
  CHECK(code_of([] { find_root([](double x) { return x * x + 1.0; }, {-1.0, 1.0, 1e-12}); }) ==
        ErrorCode::NoSignChange);
  CHECK(code_of([] { find_root([](double) { return std::nan(""); }, {0.0, 1.0, 1e-12}); }) ==
        ErrorCode::NonFinite);
  CHECK(code_of([] { find_root([](double x) { return x; }, {1.0, 0.0, 1e-12}); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("integrate: polynomial, oscillatory exponential") {
  QuadratureSpec q{1e-13, 1e-15, 4000};
  CHECK(integrate([](double x) { return x; }, 0.0, 1.0, q) == doctest::Approx(0.5).epsilon(1e-14));
  const cplx v = integrate([](double z) { return std::exp(cplx(0.0, oracle::pi * z)); }, 0.0, 1.0, q);
  CHECK(std::abs(v - cplx(0.0, 2.0 / oracle::pi)) < 1e-13);
}

TEST_CASE("integrate: r K1(r)^2 tail against a 1e6-point trapezoid and the closed form") {
  QuadratureSpec q{1e-12, 1e-300, 4000};
  auto f = [](double r) { return r * std::pow(bessel_k(1, r), 2); };
  const double cut = 40.0;
  const double gk = integrate(f, 1.0, cut, q);
  const double tz = oracle::trapezoid(
      [](double r) { return r * std::pow(std::cyl_bessel_k(1.0, r), 2); }, 1.0, cut, 1000000);
  CHECK(std::abs(gk - tz) / tz < 1e-8);
  // Int x K_1^2 = x^2/2 (K_1^2 - K_0 K_2)
  auto prim = [](double x) {
    const double k0 = std::cyl_bessel_k(0.0, x), k1 = std::cyl_bessel_k(1.0, x),
                 k2 = std::cyl_bessel_k(2.0, x);
    return 0.5 * x * x * (k1 * k1 - k0 * k2);
  };
  CHECK(std::abs(gk - (prim(cut) - prim(1.0))) / tz < 1e-11);
}

TEST_CASE("integrate: additivity over a random split") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.1, 2.9);
  QuadratureSpec q{1e-13, 1e-15, 4000};
  auto f = [](double x) { return std::exp(-x) * std::cos(5.0 * x) + x * x; };
  const double whole = integrate(f, 0.0, 3.0, q);
  for (int t = 0; t < 5; ++t) {
    const double c = u(rng);
    CHECK(std::abs(integrate(f, 0.0, c, q) + integrate(f, c, 3.0, q) - whole) < 1e-12);
  }
}

TEST_CASE("integrate: subdivision budget reports a best estimate") {
  QuadratureSpec q{1e-14, 1e-300, 10};
  try {
    integrate([](double x) { return std::sin(1.0 / x); }, 1e-6, 1.0, q);
    FAIL("expected QuadratureError");
  } catch (const QuadratureError& e) {
    CHECK(e.code() == ErrorCode::MaxSubdivisionsExceeded);
    CHECK(std::isfinite(std::abs(e.estimate())));
    CHECK(e.error_bound() > 0.0);
  }
}

TEST_CASE("bessel: integral representations") {
  for (int n : {0, 1, 2, 5, 9}) {
    for (double x : {0.3, 2.5, 7.3, 18.0}) {
      CHECK(std::abs(bessel(BesselKind::J, n, x) - oracle::bessel_j(n, x)) < 1e-12);
      const double k = oracle::bessel_k(n, x);
      CHECK(std::abs(bessel(BesselKind::K, n, x) - k) / k < 1e-10);
    }
  }
  CHECK(std::abs(bessel(BesselKind::K, 2, 3.7) - oracle::bessel_k2_series(3.7)) < 1e-12);
}

TEST_CASE("bessel: small arguments and recurrences") {
  CHECK(bessel(BesselKind::J, 0, 1e-8) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(bessel(BesselKind::J, 1, 1e-6) == doctest::Approx(5e-7).epsilon(1e-12));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ux(0.1, 50.0);
  for (int t = 0; t < 200; ++t) {
    const double x = ux(rng);
    const int m = 1 + t % 10;
    const double jm = bessel(BesselKind::J, m, x);
    const double lhs = bessel(BesselKind::J, m - 1, x) + bessel(BesselKind::J, m + 1, x);
    CHECK(std::abs(lhs - 2.0 * m / x * jm) < 1e-10);
    const double jp = bessel(BesselKind::Jp, m, x);
    CHECK(std::abs(jp - (bessel(BesselKind::J, m - 1, x) - m / x * jm)) < 1e-10);
    const double km = bessel(BesselKind::K, m, x);
    const double kp = bessel(BesselKind::Kp, m, x);
    CHECK(std::abs(kp - (-bessel(BesselKind::K, m - 1, x) - m / x * km)) < 1e-10 * std::abs(kp));
  }
}

TEST_CASE("bessel: domain and range errors") {
  CHECK(code_of([] { bessel(BesselKind::K, 0, 0.0); }) == ErrorCode::OutOfDomain);
  CHECK(code_of([] { bessel(BesselKind::J, -1, 1.0); }) == ErrorCode::OutOfDomain);
  CHECK(code_of([] { bessel(BesselKind::K, 0, 800.0); }) == ErrorCode::Overflow);
}

TEST_CASE("exp_integral matches quadrature and the q -> 0 limit") {
  QuadratureSpec q{1e-13, 1e-300, 4000};
  for (double k : {-3e3, -1.0, 1e-9, 2.5, 7e2}) {
    const double L = 0.02;
    const cplx ref = integrate([&](double z) { return std::exp(cplx(0.0, k * z)); }, 0.0, L, q);
    CHECK(std::abs(exp_integral(k, L) - ref) < 1e-13 * L);
  }
  CHECK(exp_integral(0.0, 0.3) == cplx(0.3));
}

TEST_CASE("Chebyshev interpolation is exact on low-degree polynomials") {
  auto p = [](double x) { return 1.0 - 2.0 * x + 0.5 * x * x * x; };
  Chebyshev<double> c(p, -2.0, 3.0, 6);
  for (double x : {-2.0, -1.3, 0.0, 0.77, 2.9, 3.0}) CHECK(std::abs(c(x) - p(x)) < 1e-12);
}
TEST_SUITE_END();
