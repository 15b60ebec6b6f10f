#include <doctest.h>

#include <oamfwm/coupled_modes.hpp>

#include <random>

using namespace oamfwm;

TEST_SUITE_BEGIN("coupled_modes");

namespace {

constexpr EnvelopeFamily kFamilies[4] = {EnvelopeFamily::SignalOutM, EnvelopeFamily::SignalOutMp,
                                         EnvelopeFamily::IdlerOutM, EnvelopeFamily::IdlerOutMp};

Direction dir_of(EnvelopeFamily f) {
  return (f == EnvelopeFamily::SignalOutM || f == EnvelopeFamily::SignalOutMp) ? Direction::Forward
                                                                               : Direction::Backward;
}

// log-uniform kappa L in [0.01, 30], d L in [0, 10], delta L / v up to ~10
EnvelopeParams draw(std::mt19937_64& rng, EnvelopeFamily f) {
  const double L = 0.02;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double kL = std::exp(std::log(0.01) + u(rng) * std::log(3000.0));
  const double ph = 2.0 * 3.141592653589793 * u(rng);
  const double dL = 10.0 * u(rng) * (u(rng) < 0.5 ? -1.0 : 1.0);
  const double v = 1.9e8 + 2e7 * u(rng), vp = 1.9e8 + 2e7 * u(rng);
  const double delta = (u(rng) - 0.5) * 2e11;
  return EnvelopeParams::make(std::polar(kL / L, ph), delta, dL / L, v, vp, L, dir_of(f));
}

}  // namespace

TEST_CASE("boundary conditions of the four families") {
  const auto pf = EnvelopeParams::make({300.0, 40.0}, 3e10, 20.0, 2e8, 2.01e8, 0.02, Direction::Forward);
  const auto pb = EnvelopeParams::make({300.0, 40.0}, 3e10, 20.0, 2e8, 2.01e8, 0.02, Direction::Backward);
  auto a = envelopes(pf, EnvelopeFamily::SignalOutM)(0.02);
  CHECK(std::abs(a.first - 1.0) < 1e-15);
  CHECK(std::abs(a.second) < 1e-15);
  a = envelopes(pf, EnvelopeFamily::SignalOutMp)(0.02);
  CHECK(std::abs(a.first) < 1e-15);
  CHECK(std::abs(a.second - 1.0) < 1e-15);
  a = envelopes(pb, EnvelopeFamily::IdlerOutM)(0.0);
  CHECK(a.first == cplx(1.0));
  CHECK(a.second == cplx(0.0));
  a = envelopes(pb, EnvelopeFamily::IdlerOutMp)(0.0);
  CHECK(a.first == cplx(0.0));
  CHECK(a.second == cplx(1.0));
}

TEST_CASE("unitarity over random parameters") {
  std::mt19937_64 rng(1);
  double worst = 0.0;
  for (auto f : kFamilies) {
    for (int t = 0; t < 100; ++t) {
      const auto sol = envelopes(draw(rng, f), f);
      for (int k = 0; k < 100; ++k) {
        const auto a = sol(0.02 * k / 99.0);
        worst = std::max(worst, std::abs(std::norm(a.first) + std::norm(a.second) - 1.0));
      }
    }
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("closed forms agree with RK4 integration of the coupled-mode equations") {
  std::mt19937_64 rng(2);
  double worst = 0.0;
  for (auto f : kFamilies) {
    for (int t = 0; t < 25; ++t) {
      const auto p = draw(rng, f);
      const auto sol = envelopes(p, f);
      const auto num = ode_oracle(p, f, 10000);
      for (std::size_t k = 0; k < num.z.size(); k += 50) {
        const auto a = sol(num.z[k]);
        worst = std::max({worst, std::abs(a.first - num.a[k].first), std::abs(a.second - num.a[k].second)});
      }
    }
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("RK4 oracle converges at fourth order") {
  const auto p = EnvelopeParams::make({800.0, -300.0}, 5e10, 150.0, 2e8, 2.02e8, 0.02, Direction::Forward);
  const auto sol = envelopes(p, EnvelopeFamily::SignalOutMp);
  auto err = [&](int n) {
    const auto num = ode_oracle(p, EnvelopeFamily::SignalOutMp, n);
    const auto a = sol(0.0);
    return std::abs(a.first - num.a.front().first) + std::abs(a.second - num.a.front().second);
  };
  const double order = std::log2(err(1000) / err(2000));
  CHECK(order > 3.7);
  CHECK(order < 4.3);
}

TEST_CASE("uncoupled limit is a pure phase") {
  const auto p = EnvelopeParams::make(0.0, 4e10, 35.0, 2e8, 2.05e8, 0.02, Direction::Forward);
  const auto sol = envelopes(p, EnvelopeFamily::SignalOutM);
  for (double z : {0.0, 0.005, 0.013, 0.02}) {
    const auto a = sol(z);
    CHECK(std::abs(std::abs(a.first) - 1.0) < 1e-15);
    CHECK(a.second == cplx(0.0));
  }
}

TEST_CASE("resonant transfer follows |sin(kappa (L - z))|") {
  const double kappa = 157.0;
  const auto p = EnvelopeParams::make(kappa, 0.0, 0.0, 2e8, 2.05e8, 0.02, Direction::Forward);
  const auto sol = envelopes(p, EnvelopeFamily::SignalOutMp);
  for (double z : {0.0, 0.004, 0.011, 0.019}) {
    CHECK(std::abs(std::abs(sol(z).first) - std::abs(std::sin(kappa * (0.02 - z)))) < 1e-14);
  }
}

TEST_CASE("reciprocity of the cross amplitudes") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    const auto p = draw(rng, EnvelopeFamily::SignalOutM);
    const auto a = envelopes(p, EnvelopeFamily::SignalOutM), b = envelopes(p, EnvelopeFamily::SignalOutMp);
    for (double z : {0.0, 0.007, 0.015}) {
      CHECK(std::abs(std::abs(a(z).second) - std::abs(b(z).first)) < 1e-13);
    }
  }
}

TEST_CASE("error paths") {
  const auto pf = EnvelopeParams::make(100.0, 0.0, 0.0, 2e8, 2e8, 0.02, Direction::Forward);
  CHECK_THROWS_AS(envelopes(pf, EnvelopeFamily::IdlerOutM), Error);
  CHECK_THROWS_AS(ode_oracle(pf, EnvelopeFamily::SignalOutM, 10), Error);
  CHECK_THROWS_AS(EnvelopeParams::make(100.0, 0.0, 0.0, 2e8, 2e8, 0.0, Direction::Forward), Error);
  EnvelopeParams bad = pf;
  bad.gamma = 1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_SUITE_END();
