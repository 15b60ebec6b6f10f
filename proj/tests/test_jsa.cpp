#include <doctest.h>

#include <oamfwm/jsa.hpp>

#include <random>

using namespace oamfwm;

TEST_SUITE_BEGIN("jsa");

namespace {

DispersionCache& cache() {
  static DispersionCache c{FiberSpec{}};
  return c;
}

const PumpConfig kPump{};

JsaChannel channel(int m) { return {{m, Sam::Plus}, {-m, Sam::Minus, 1, Direction::Backward}}; }

// Delta k for the (signal, idler) pair straight from the dispersion cache.
double mismatch(const JsaChannel& ch, double dw) {
  const double w1 = kPump.omega1(), w2 = kPump.omega2();
  const ModeLabel p{Family::HE, 1};
  return cache().get(p, w1).k - cache().get(p, w2).k - cache().get(hybrid_partner(ch.signal), w1 + dw).k +
         cache().get(hybrid_partner(ch.idler), w2 - dw).k;
}

double max_abs(const std::vector<cplx>& v) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, std::abs(x));
  return m;
}

JsaOptions exact_options() {
  JsaOptions o;
  o.chebyshev_nodes = 0;
  return o;
}

}  // namespace

TEST_CASE("grid and pump validation") {
  CHECK_THROWS_AS((DetuningGrid{0.0, 1.0, 1}).validate(), Error);
  CHECK_THROWS_AS((DetuningGrid{1.0, 0.0, 10}).validate(), Error);
  CHECK_THROWS_AS((PumpConfig{1.5, 0.5, -1.0}).validate(), Error);
  const DetuningGrid g{-3.0, 5.0, 5};
  CHECK(g.at(0) == -3.0);
  CHECK(g.at(4) == 5.0);
  CHECK(g.at(2) == 1.0);
}

TEST_CASE("no-grating JSA: closed form against z quadrature, energy conservation") {
  const auto ch = channel(2);
  const DetuningGrid grid{-4e11, 4e11, 21};
  const auto jsa = jsa_no_grating(cache(), ch, kPump, grid, exact_options());
  const double peak = max_abs(jsa.amplitude);
  for (int j = 0; j < grid.points; ++j) {
    const double dw = grid.at(j);
    CHECK(jsa.omega_i[j] == kPump.omega1() + kPump.omega2() - jsa.omega_s[j]);
    FwmChannel f{ch.signal, ch.idler, kPump.omega1() + dw, kPump.omega2() - dw, kPump.omega1(), kPump.omega2()};
    const cplx I = fwm_overlap(cache(), f);
    const double dk = mismatch(ch, dw);
    const cplx z = integrate([&](double zz) { return std::exp(cplx(0.0, dk * zz)); }, 0.0, kPump.L_m,
                             {1e-12, 1e-17, 10000});
    CHECK(std::abs(jsa.amplitude[j] - I * z) < 1e-9 * peak);
  }
}

TEST_CASE("no-grating JSI maximum decreases with the OAM order") {
  double prev = 1e300;
  for (int m = 1; m <= 3; ++m) {
    const auto ch = channel(m);
    const auto grid = suggested_grid(cache(), ch, kPump, std::nullopt, {});
    const double mx = jsa_no_grating(cache(), ch, kPump, grid).max_jsi();
    CHECK(mx < prev);
    prev = mx;
  }
}

TEST_CASE("forbidden channels are refused") {
  const JsaChannel bad{{1, Sam::Plus}, {-2, Sam::Minus, 1, Direction::Backward}};
  try {
    jsa_no_grating(cache(), bad, kPump, {-1e11, 1e11, 11});
    FAIL("expected ForbiddenChannel");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ForbiddenChannel);
  }
}

TEST_CASE("Chebyshev sampling matches exact evaluation") {
  const auto g = resonant_gratings(cache(), kPump, 3, 2.9e-2);
  const JsaChannel ch{g.signal.to, g.idler.to};
  const DetuningGrid grid{-6e12, 6e12, 31};
  JsaOptions fast;
  fast.z_integration = ZIntegration::Exponential;
  JsaOptions slow = fast;
  slow.chebyshev_nodes = 0;
  const auto a = jsa_full(cache(), ch, kPump, g, grid, fast);
  const auto b = jsa_full(cache(), ch, kPump, g, grid, slow);
  const double peak = max_abs(b.amplitude);
  for (int j = 0; j < grid.points; ++j) CHECK(std::abs(a.amplitude[j] - b.amplitude[j]) < 1e-8 * peak);
}

TEST_CASE("adaptive z quadrature agrees with the exponential-sum integral") {
  const auto g = resonant_gratings(cache(), kPump, 6, 2.9e-2);
  const JsaChannel ch{g.signal.to, g.idler.to};
  const DetuningGrid grid{-5e12, 5e12, 15};
  JsaOptions ex;
  ex.z_integration = ZIntegration::Exponential;
  JsaOptions ad;
  ad.z_integration = ZIntegration::Adaptive;
  const auto a = jsa_full(cache(), ch, kPump, g, grid, ad);
  const auto b = jsa_full(cache(), ch, kPump, g, grid, ex);
  const double peak = max_abs(b.amplitude);
  for (int j = 0; j < grid.points; ++j) {
    for (int t = 0; t < 4; ++t) CHECK(std::abs(a.terms[j][t] - b.terms[j][t]) < 1e-9 * peak);
  }
}

TEST_CASE("weak gratings converge linearly to the no-grating JSA") {
  const JsaChannel ch = channel(1);
  const DetuningGrid grid{-3e11, 3e11, 13};
  JsaOptions o;
  o.z_integration = ZIntegration::Exponential;
  const auto ref = jsa_no_grating(cache(), ch, kPump, grid, o);
  const double peak = max_abs(ref.amplitude);
  auto diff = [&](double de) {
    const auto g = resonant_gratings(cache(), kPump, 3, de);
    const auto j = jsa_full(cache(), ch, kPump, g, grid, o);
    double m = 0.0;
    for (int k = 0; k < grid.points; ++k) m = std::max(m, std::abs(j.amplitude[k] - ref.amplitude[k]));
    return m / peak;
  };
  const double d1 = diff(1e-9), d2 = diff(1e-10);
  CHECK(d1 < 1e-6);
  CHECK(d2 < 1e-7);
  CHECK(d1 / d2 == doctest::Approx(10.0).epsilon(0.05));
  CHECK(diff(1e-13) < 1e-9);
}

TEST_CASE("resonant dominant term at zero detuning equals I times the sin-sin integral") {
  const auto g = resonant_gratings(cache(), kPump, 3, 2.9e-2);
  const JsaChannel ch{g.signal.to, g.idler.to};
  const JsaChannel src{g.signal.from, g.idler.from};
  const DetuningGrid grid{-1e9, 1e9, 3};
  JsaOptions o = exact_options();
  o.dominant_only = true;
  o.z_integration = ZIntegration::Exponential;
  const auto full = jsa_full(cache(), ch, kPump, g, grid, o);
  const double ks = std::abs(coupling_constant(cache(), g.signal, g.signal.from, g.signal.to, kPump.omega1()));
  const double ki = std::abs(coupling_constant(cache(), g.idler, g.idler.from, g.idler.to, kPump.omega2()));
  const auto ideal = jsa_ideal_components(cache(), src, kPump, ks, ki, grid, o);
  FwmChannel f{src.signal, src.idler, kPump.omega1(), kPump.omega2(), kPump.omega1(), kPump.omega2()};
  const cplx I = fwm_overlap(cache(), f);
  CHECK(std::abs(full.amplitude[1]) == doctest::Approx(std::abs(I * ideal[3].amplitude[1])).epsilon(1e-8));
}

TEST_CASE("ideal components: uncoupled limit and the kappa_s <-> kappa_i mirror") {
  const JsaChannel src = channel(1);
  const DetuningGrid grid{-2e12, 2e12, 41};
  const auto zero = jsa_ideal_components(cache(), src, kPump, 0.0, 0.0, grid);
  for (int j = 0; j < grid.points; ++j) {
    const cplx ref = exp_integral(mismatch(src, grid.at(j)), kPump.L_m);
    CHECK(std::abs(zero[0].amplitude[j] - ref) < 1e-12 * kPump.L_m);
    for (int c = 1; c < 4; ++c) CHECK(std::abs(zero[c].amplitude[j]) < 1e-15);
  }
  const auto a = jsa_ideal_components(cache(), src, kPump, 900.0, 2300.0, grid);
  const auto b = jsa_ideal_components(cache(), src, kPump, 2300.0, 900.0, grid);
  for (int j = 0; j < grid.points; ++j) {
    CHECK(std::abs(std::abs(a[1].amplitude[j]) - std::abs(b[2].amplitude[j])) < 1e-12 * kPump.L_m);
  }
}

TEST_CASE("sin-sin component peaks where dk = kappa_s + kappa_i") {
  const JsaChannel src = channel(1);
  const double ks = 1e4, ki = 1.5e4;
  const double target = ks + ki;
  // dk falls with dw; bracket the root
  const double root = find_root([&](double dw) { return mismatch(src, dw) - target; },
                                {-1e13, 1e13, 1e-14});
  const double slope = (mismatch(src, root + 1e9) - mismatch(src, root - 1e9)) / 2e9;
  const double lobe = std::abs(2.0 * kPi / kPump.L_m / slope);
  const double cell = lobe / 20.0;
  const DetuningGrid grid{root - 2.0 * lobe, root + 2.0 * lobe, 81};
  const auto comp = jsa_ideal_components(cache(), src, kPump, ks, ki, grid);
  int best = 0;
  for (int j = 0; j < grid.points; ++j)
    if (std::abs(comp[3].amplitude[j]) > std::abs(comp[3].amplitude[best])) best = j;
  CHECK(std::abs(grid.at(best) - root) <= cell);
}

TEST_CASE("peak roots match the brute-force argmax on a ten times finer grid") {
  const auto g = resonant_gratings(cache(), kPump, 3, 2.9e-2);
  const JsaChannel ch{g.signal.to, g.idler.to};
  JsaOptions o;
  o.z_integration = ZIntegration::Exponential;
  o.dominant_only = true;
  const auto grid = suggested_grid(cache(), ch, kPump, g, o);
  const auto pk = peak_positions(cache(), ch, kPump, g, grid, o);
  REQUIRE(pk.missing.empty());
  const double cell = grid.step();
  for (const auto& r : pk.roots) {
    const DetuningGrid fine{*r - 3.0 * cell, *r + 3.0 * cell, 61};
    const auto j = jsa_full(cache(), ch, kPump, g, fine, o);
    int best = 0;
    for (int k = 0; k < fine.points; ++k)
      if (std::abs(j.amplitude[k]) > std::abs(j.amplitude[best])) best = k;
    CHECK(std::abs(fine.at(best) - *r) <= cell);
  }
}

TEST_CASE("four dominant local maxima for a resonant high-OAM channel") {
  const auto g = resonant_gratings(cache(), kPump, 3, 2.9e-2);
  const JsaChannel ch{g.signal.to, g.idler.to};
  JsaOptions o;
  o.z_integration = ZIntegration::Exponential;
  o.dominant_only = true;
  const auto grid = suggested_grid(cache(), ch, kPump, g, o);
  const auto jsi = jsa_full(cache(), ch, kPump, g, grid, o).jsi();
  const double mx = *std::max_element(jsi.begin(), jsi.end());
  int count = 0;
  for (std::size_t k = 1; k + 1 < jsi.size(); ++k)
    if (jsi[k] > 0.1 * mx && jsi[k] >= jsi[k - 1] && jsi[k] > jsi[k + 1]) ++count;
  CHECK(count == 4);
}

TEST_CASE("vanishing coupling collapses the four roots onto the centre") {
  const auto g = resonant_gratings(cache(), kPump, 3, 1e-12);
  const JsaChannel ch{g.signal.to, g.idler.to};
  JsaOptions o;
  o.dominant_only = true;
  const DetuningGrid grid{-2e12, 2e12, 401};
  const auto pk = peak_positions(cache(), ch, kPump, g, grid, o);
  REQUIRE(pk.centre.has_value());
  for (const auto& r : pk.roots) {
    REQUIRE(r.has_value());
    CHECK(std::abs(*r - *pk.centre) < grid.step());
  }
}

TEST_CASE("pair ratio contract") {
  const auto g = resonant_gratings(cache(), kPump, 3, 2.9e-2);
  JsaOptions o;
  o.z_integration = ZIntegration::Exponential;
  CHECK_THROWS_AS(pair_ratio(cache(), channel(2), kPump, g, {-1e12, 1e12, 101}, o), Error);
  try {
    pair_ratio(cache(), {g.signal.to, g.idler.to}, kPump, g, {-1e11, 1e11, 51}, o, 1e-6, 0);
    FAIL("expected GridTooNarrow");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GridTooNarrow);
  }
}

TEST_CASE("Bell fidelity formula") {
  CHECK(bell_fidelity(0.3, 0.3) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(bell_fidelity(1.0, 0.0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(bell_fidelity(0.0, 0.0) == 0.0);
  CHECK(bell_fidelity(0.4, -0.4) == 0.0);
  CHECK(bell_fidelity(cplx(0.0, 0.2), cplx(0.0, 0.2)) == doctest::Approx(1.0).epsilon(1e-15));
  // tabulated diagonal overlaps of the two conserving families
  const double A[4] = {0.225874, 0.164477, 0.124059, 0.093515};
  const double B[4] = {0.224501, 0.163736, 0.123113, 0.092491};
  const double F[4] = {0.999995, 0.999997, 0.999993, 0.999985};
  for (int k = 0; k < 4; ++k) {
    const double ref = (A[k] + B[k]) / std::sqrt(2.0 * (A[k] * A[k] + B[k] * B[k]));
    CHECK(bell_fidelity(A[k], B[k]) == doctest::Approx(ref).epsilon(1e-15));
    CHECK(std::abs(bell_fidelity(A[k], B[k]) - F[k]) < 1.5e-6);
  }
}

TEST_CASE("computed fidelity: diagonal near one, checkerboard exactly zero") {
  for (int m = 1; m <= 2; ++m) {
    const auto r = bell_fidelity(cache(), kPump, m, m);
    CHECK(r.fidelity > 0.9999);
    CHECK(r.fidelity <= 1.0);
  }
  const auto off = bell_fidelity(cache(), kPump, 1, 2);
  CHECK(off.fidelity == 0.0);
  CHECK(off.A == cplx(0.0));
  CHECK(off.B == cplx(0.0));
}

TEST_SUITE_END();
