#include <doctest.h>

#include <oamfwm/overlap.hpp>

#include <random>

using namespace oamfwm;

TEST_SUITE_BEGIN("overlap");

namespace {

const double kW1 = omega_from_wavelength_um(1.5);
const double kW2 = omega_from_wavelength_um(0.5);

DispersionCache& cache() {
  static DispersionCache c{FiberSpec{}};
  return c;
}

FwmChannel channel(OamLabel s, OamLabel i) {
  FwmChannel ch;
  ch.signal = s;
  ch.idler = i;
  ch.idler.dir = Direction::Backward;
  ch.omega_p1 = ch.omega_s = kW1;
  ch.omega_p2 = ch.omega_i = kW2;
  return ch;
}

}  // namespace

TEST_CASE("isotropic chi3 elements") {
  Chi3Tensor chi;
  CHECK(chi.element(0, 0, 0, 0) == 1.0);
  CHECK(chi.element(2, 2, 2, 2) == 1.0);
  CHECK(chi.element(0, 0, 1, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(chi.element(0, 1, 0, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(chi.element(1, 0, 0, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(chi.element(0, 0, 0, 1) == 0.0);
  CHECK(chi.element(0, 1, 2, 0) == 0.0);
  CHECK(Chi3Tensor::terms().size() == 21);
}

TEST_CASE("angular momentum rule") {
  CHECK(angular_momentum_allowed(channel({1, Sam::Plus}, {-1, Sam::Minus})) ==
        AngularMomentumRule::AllowedConserving);
  CHECK(angular_momentum_allowed(channel({1, Sam::Plus}, {1, Sam::Minus})) ==
        AngularMomentumRule::AllowedSpinOrbit);
  CHECK(angular_momentum_allowed(channel({1, Sam::Plus}, {-2, Sam::Minus})) ==
        AngularMomentumRule::Forbidden);
  CHECK(angular_momentum_allowed(channel({2, Sam::Plus}, {-4, Sam::Plus})) ==
        AngularMomentumRule::AllowedConserving);
}

TEST_CASE("forbidden channels give exact zeros, allowed ones do not") {
  CHECK(fwm_overlap(cache(), channel({1, Sam::Plus}, {-2, Sam::Minus})) == cplx(0.0));
  const cplx v = fwm_overlap(cache(), channel({1, Sam::Plus}, {-1, Sam::Minus}));
  CHECK(std::abs(v) > 0.1);
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> q(-6, 6), s(0, 1);
  int forbidden = 0;
  while (forbidden < 200) {
    OamLabel a{q(rng), s(rng) ? Sam::Plus : Sam::Minus};
    OamLabel b{q(rng), s(rng) ? Sam::Plus : Sam::Minus};
    const auto ch = channel(a, b);
    if (angular_momentum_allowed(ch) != AngularMomentumRule::Forbidden) continue;
    ++forbidden;
    CHECK(fwm_overlap(cache(), ch, {}, true) == cplx(0.0));
  }
}

TEST_CASE("hybrid overlap equals its OAM decomposition") {
  // HE_{m+1}(e) = (O+m^+ + O-m^-)/sqrt2, so with conj-linear signal and idler
  // slots I(HE e, HE e) = 1/2 sum over the four OAM pairs.
  const auto base = channel({1, Sam::Plus}, {-1, Sam::Minus});
  const auto p1 = hybrid_profile(cache(), base.pump1, kW1);
  const auto p2 = hybrid_profile(cache(), base.pump2, kW2);
  for (int m : {1, 2}) {
    const OamLabel lp{m, Sam::Plus}, lm{-m, Sam::Minus};
    const auto sp = oam_profile(cache(), lp, kW1), sm = oam_profile(cache(), lm, kW1);
    const auto ip = oam_profile(cache(), lp, kW2), im = oam_profile(cache(), lm, kW2);
    cplx sum = 0.0;
    for (const auto* s : {&sp, &sm})
      for (const auto* i : {&ip, &im}) sum += contract_overlap(p1, p2, *s, *i);
    const ModeLabel he{Family::HE, m + 1, 1, Parity::Even};
    const cplx direct = hybrid_overlap(cache(), base, he, he);
    CHECK(std::abs(direct - 0.5 * sum) < 1e-9 * std::abs(direct));
  }
}

TEST_CASE("even/odd cross overlap vanishes by mirror symmetry") {
  const auto base = channel({1, Sam::Plus}, {-1, Sam::Minus});
  const ModeLabel e{Family::HE, 3, 1, Parity::Even}, o{Family::HE, 3, 1, Parity::Odd};
  CHECK(std::abs(hybrid_overlap(cache(), base, e, o)) < 1e-14);
}

TEST_CASE("overlap is stable under tighter quadrature") {
  const auto ch = channel({2, Sam::Plus}, {-2, Sam::Minus});
  const cplx a = fwm_overlap(cache(), ch, {1e-8, 1e-14, 4000});
  const cplx b = fwm_overlap(cache(), ch, {1e-12, 1e-16, 4000});
  CHECK(std::abs(a - b) < 1e-8 * std::abs(b));
}

TEST_CASE("table structure: checkerboard in II, single (1,1) cell in IV and VII") {
  const TableFrequencies fr{kW1, kW2, kW1, kW2};
  const auto t2 = overlap_table(cache(), table_family(2), 4, fr);
  for (int mi = 1; mi <= 4; ++mi) {
    for (int ms = 1; ms <= 4; ++ms) {
      if ((mi + ms) % 2 == 1) {
        CHECK(t2.at(mi, ms) == cplx(0.0));
      }
    }
    CHECK(std::abs(t2.at(mi, mi)) > 0.0);
  }
  for (int n : {4, 7}) {
    const auto t = overlap_table(cache(), table_family(n), 4, fr);
    for (int mi = 1; mi <= 4; ++mi)
      for (int ms = 1; ms <= 4; ++ms) {
        INFO("table " << n << " cell " << mi << "," << ms);
        if (mi == 1 && ms == 1) {
          CHECK(std::abs(t.at(mi, ms)) > 0.0);
        } else {
          CHECK(t.at(mi, ms) == cplx(0.0));
        }
      }
  }
  const auto zero = overlap_table(cache(), all_table_families().back(), 4, fr);
  for (const cplx& v : zero.values) CHECK(v == cplx(0.0));
}

TEST_CASE("parallel table generation matches the serial one") {
  const TableFrequencies fr{kW1, kW2, kW1, kW2};
  const auto a = overlap_table(cache(), table_family(5), 3, fr, {}, 1);
  const auto b = overlap_table(cache(), table_family(5), 3, fr, {}, 3);
  for (std::size_t k = 0; k < a.values.size(); ++k) CHECK(a.values[k] == b.values[k]);
}

TEST_SUITE_END();
