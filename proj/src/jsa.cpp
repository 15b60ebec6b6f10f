#include <oamfwm/jsa.hpp>
#include <oamfwm/parallel.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace oamfwm {

namespace {

const ModeLabel kPump{Family::HE, 1, 1, Parity::Even};
const cplx kI(0.0, 1.0);

// c exp(i q z)
struct Wave {
  cplx c;
  double q;
};
using Waves = std::array<Wave, 2>;

// alpha cos(g x) + beta sin(g x) / g, with x = L - z when mirrored, else x = z.
// beta only ever carries kappa or d, both zero when g is, so beta / g -> 0 there.
Waves trig(cplx alpha, cplx beta, double g, double L, bool mirror) {
  const cplx b = g == 0.0 ? cplx(0.0) : beta / g;
  const cplx p = 0.5 * alpha + b / (2.0 * kI);
  const cplx m = 0.5 * alpha - b / (2.0 * kI);
  if (mirror) return {Wave{p * std::polar(1.0, g * L), -g}, Wave{m * std::polar(1.0, -g * L), g}};
  return {Wave{p, g}, Wave{m, -g}};
}

Waves with_phase(Waves w, double c0, double c1) {
  for (auto& x : w) {
    x.c *= std::polar(1.0, c0);
    x.q += c1;
  }
  return w;
}

// The closed-form envelopes as exponential sums: (amplitude on m, on m').
std::array<Waves, 2> envelope_waves(const EnvelopeParams& p, EnvelopeFamily f) {
  const double g = p.gamma, d = p.d, dl = p.delta, L = p.L;
  const double v = p.v_g_m, vp = p.v_g_mp;
  const cplx kc = std::conj(p.kappa);
  switch (f) {
    case EnvelopeFamily::SignalOutM: {
      const double A = d + dl / v;
      return {with_phase(trig(1.0, -kI * d, g, L, true), A * L, -A),
              with_phase(trig(0.0, -kI * kc, g, L, true), L * d + dl * L / v, d - dl / vp)};
    }
    case EnvelopeFamily::SignalOutMp: {
      const double B = -d + dl / vp;
      return {with_phase(trig(0.0, -kI * p.kappa, g, L, true), -(d * L - dl * L / vp), -(d + dl / v)),
              with_phase(trig(1.0, kI * d, g, L, true), B * L, -B)};
    }
    case EnvelopeFamily::IdlerOutM:
      return {with_phase(trig(1.0, -kI * d, g, L, false), 0.0, d + dl / v),
              with_phase(trig(0.0, -kI * kc, g, L, false), 0.0, -(d - dl / vp))};
    case EnvelopeFamily::IdlerOutMp:
      return {with_phase(trig(0.0, -kI * p.kappa, g, L, false), 0.0, d + dl / v),
              with_phase(trig(1.0, kI * d, g, L, false), 0.0, -(d - dl / vp))};
  }
  return {};
}

// Int_0^L exp(i dk z) conj(s(z)) conj(i(z)) dz for exponential sums s, i.
cplx wave_integral(double dk, const Waves& s, const Waves& i, double L) {
  cplx total = 0.0;
  for (const auto& a : s) {
    for (const auto& b : i) {
      const cplx c = std::conj(a.c) * std::conj(b.c);
      if (c == cplx(0.0)) continue;
      total += c * exp_integral(dk - a.q - b.q, L);
    }
  }
  return total;
}

double max_rate(double dk, const Waves& s, const Waves& i) {
  double q = std::abs(dk);
  for (const auto& a : s)
    for (const auto& b : i) q = std::max(q, std::abs(dk - a.q - b.q));
  return q;
}

cplx pick(const AmplitudePair& a, int y) { return y == 0 ? a.first : a.second; }

void check_channel_directions(const JsaChannel& c) {
  if (c.signal.dir != Direction::Forward || c.idler.dir != Direction::Backward) {
    throw Error(ErrorCode::DirectionMismatch, "jsa", "signal must be forward and idler backward");
  }
}

JsaGrid empty_grid(const JsaChannel& channel, const PumpConfig& pump, const DetuningGrid& grid) {
  JsaGrid out;
  out.channel = channel;
  const std::size_t n = static_cast<std::size_t>(grid.points);
  out.detuning.resize(n);
  out.omega_s.resize(n);
  out.omega_i.resize(n);
  out.amplitude.assign(n, 0.0);
  out.terms.assign(n, {});
  const double w1 = pump.omega1(), w2 = pump.omega2();
  for (std::size_t j = 0; j < n; ++j) {
    out.detuning[j] = grid.at(static_cast<int>(j));
    out.omega_s[j] = w1 + out.detuning[j];
    out.omega_i[j] = w1 + w2 - out.omega_s[j];
  }
  out.normalization_reference = "unnormalized (Gamma = 1)";
  return out;
}

EnvelopeFamily signal_family(const JsaChannel& c, const GratingPair& g) {
  if (c.signal == g.signal.from) return EnvelopeFamily::SignalOutM;
  if (c.signal == g.signal.to) return EnvelopeFamily::SignalOutMp;
  throw Error(ErrorCode::ForbiddenChannel, "jsa", "signal mode is not coupled by the signal grating");
}

EnvelopeFamily idler_family(const JsaChannel& c, const GratingPair& g) {
  if (c.idler == g.idler.from) return EnvelopeFamily::IdlerOutM;
  if (c.idler == g.idler.to) return EnvelopeFamily::IdlerOutMp;
  throw Error(ErrorCode::ForbiddenChannel, "jsa", "idler mode is not coupled by the idler grating");
}

bool tails_converged(const std::vector<double>& jsi, double fraction) {
  const double peak = *std::max_element(jsi.begin(), jsi.end());
  if (peak == 0.0) return true;
  const std::size_t n = jsi.size();
  const std::size_t edge = std::max<std::size_t>(3, n / 100);
  if (2 * edge >= n) return false;
  double tail = 0.0;
  for (std::size_t j = 0; j < edge; ++j) tail = std::max({tail, jsi[j], jsi[n - 1 - j]});
  return tail <= fraction * peak;
}

}  // namespace

void PumpConfig::validate() const {
  if (!(lambda1_um > 0.0) || !(lambda2_um > 0.0) || !std::isfinite(lambda1_um) ||
      !std::isfinite(lambda2_um)) {
    throw Error(ErrorCode::InvalidArgument, "jsa", "pump wavelengths must be > 0");
  }
  if (!(L_m > 0.0) || !std::isfinite(L_m)) {
    throw Error(ErrorCode::InvalidArgument, "jsa", "fiber length must be > 0");
  }
}

std::string JsaChannel::name() const { return signal.name() + ";" + idler.name(); }

void DetuningGrid::validate() const {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw Error(ErrorCode::InvalidArgument, "jsa", "detuning grid needs finite lo < hi");
  }
  if (points < 2) throw Error(ErrorCode::InvalidArgument, "jsa", "detuning grid needs >= 2 points");
}

const char* to_string(DispersionModel m) {
  return m == DispersionModel::SingleCount ? "single_count" : "literal";
}

const char* to_string(ZIntegration z) {
  return z == ZIntegration::Adaptive ? "adaptive" : "exponential";
}

std::vector<double> JsaGrid::jsi() const {
  std::vector<double> out(amplitude.size());
  for (std::size_t j = 0; j < amplitude.size(); ++j) out[j] = std::norm(amplitude[j]);
  return out;
}

double JsaGrid::max_jsi() const {
  double m = 0.0;
  for (const auto& a : amplitude) m = std::max(m, std::norm(a));
  return m;
}

double JsaGrid::integrated_jsi() const {
  if (detuning.size() < 2) return 0.0;
  return trapezoid_uniform(jsi(), (detuning.back() - detuning.front()) / (detuning.size() - 1));
}

GratingPair resonant_gratings(DispersionCache& cache, const PumpConfig& pump, int m_prime,
                              double delta_eps0) {
  pump.validate();
  if (m_prime < 2) throw Error(ErrorCode::InvalidArgument, "jsa", "m' must be >= 2");
  const OamLabel sf{1, Sam::Plus}, st{m_prime, Sam::Plus};
  const OamLabel idf{-1, Sam::Minus, 1, Direction::Backward};
  const OamLabel idt{-m_prime, Sam::Minus, 1, Direction::Backward};
  return {resonant_grating(cache, sf, st, pump.omega1(), delta_eps0, Photon::Signal),
          resonant_grating(cache, idf, idt, pump.omega2(), delta_eps0, Photon::Idler)};
}

SpectralModel::SpectralModel(DispersionCache& cache, const PumpConfig& pump,
                             const JsaChannel& channel, const std::optional<GratingPair>& gratings,
                             double lo, double hi, const JsaOptions& options)
    : cache_(&cache), pump_(pump), channel_(channel), gratings_(gratings), opt_(options),
      lo_(lo), hi_(hi) {
  pump.validate();
  check_channel_directions(channel);
  if (!(lo <= hi)) throw Error(ErrorCode::InvalidArgument, "jsa", "spectral window needs lo <= hi");
  if (gratings) {
    gratings->signal.validate();
    gratings->idler.validate();
    sig_ = {gratings->signal.from, gratings->signal.to};
    idl_ = {gratings->idler.from, gratings->idler.to};
    nmodes_ = 2;
    signal_family(channel, *gratings);
    idler_family(channel, *gratings);
    for (int j = 0; j < 2; ++j) {
      ks_t_[j] = cache.get(hybrid_partner(sig_[j]), gratings->signal.omega_t).k;
      ki_t_[j] = cache.get(hybrid_partner(idl_[j]), gratings->idler.omega_t).k;
    }
  } else {
    sig_[0] = channel.signal;
    idl_[0] = channel.idler;
    nmodes_ = 1;
  }
  for (int j = 0; j < nmodes_; ++j) {
    sig_[j].validate();
    idl_[j].validate();
  }
  k1_ = cache.get(kPump, pump.omega1()).k;
  k2_ = cache.get(kPump, pump.omega2()).k;

  const int n = options.chebyshev_nodes;
  if (n == 0 || lo == hi) return;
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "jsa", "chebyshev_nodes must be 0 or >= 2");
  const auto x = Chebyshev<double>::nodes(lo, hi, n);
  std::vector<SpectralSample> s(n);
  parallel_for(n, options.workers, [&](std::size_t j) { s[j] = exact(x[j]); });
  auto collect_r = [&](auto get) {
    std::vector<double> v(n);
    for (int j = 0; j < n; ++j) v[j] = get(s[j]);
    real_.emplace_back(lo, hi, std::move(v));
  };
  auto collect_c = [&](auto get) {
    std::vector<cplx> v(n);
    for (int j = 0; j < n; ++j) v[j] = get(s[j]);
    complex_.emplace_back(lo, hi, std::move(v));
  };
  for (int j = 0; j < 2; ++j) collect_r([j](const SpectralSample& p) { return p.ks[j]; });
  for (int j = 0; j < 2; ++j) collect_r([j](const SpectralSample& p) { return p.vs[j]; });
  for (int j = 0; j < 2; ++j) collect_r([j](const SpectralSample& p) { return p.ki[j]; });
  for (int j = 0; j < 2; ++j) collect_r([j](const SpectralSample& p) { return p.vi[j]; });
  for (int j = 0; j < 4; ++j) collect_c([j](const SpectralSample& p) { return p.I[j]; });
  collect_c([](const SpectralSample& p) { return p.kappa_s; });
  collect_c([](const SpectralSample& p) { return p.kappa_i; });
  interpolated_ = true;
}

SpectralSample SpectralModel::exact(double dw) const {
  SpectralSample s;
  const double w1 = pump_.omega1(), w2 = pump_.omega2();
  s.dw = dw;
  s.omega_s = w1 + dw;
  s.omega_i = w1 + w2 - s.omega_s;
  s.k1 = k1_;
  s.k2 = k2_;
  s.ks_t = ks_t_;
  s.ki_t = ki_t_;
  for (int j = 0; j < nmodes_; ++j) {
    const auto ps = cache_->get(hybrid_partner(sig_[j]), s.omega_s);
    const auto pi = cache_->get(hybrid_partner(idl_[j]), s.omega_i);
    s.ks[j] = ps.k;
    s.vs[j] = ps.v_g;
    s.ki[j] = pi.k;
    s.vi[j] = pi.v_g;
  }
  for (int a = 0; a < nmodes_; ++a) {
    for (int b = 0; b < nmodes_; ++b) {
      FwmChannel ch{sig_[a], idl_[b], s.omega_s, s.omega_i, w1, w2};
      s.I[2 * a + b] = fwm_overlap(*cache_, ch, opt_.quad);
    }
  }
  if (gratings_) {
    const auto& g = *gratings_;
    s.kappa_s = coupling_constant(*cache_, g.signal, g.signal.from, g.signal.to, s.omega_s, opt_.quad);
    s.kappa_i = coupling_constant(*cache_, g.idler, g.idler.from, g.idler.to, s.omega_i, opt_.quad);
  }
  return s;
}

SpectralSample SpectralModel::at(double dw) const {
  if (!interpolated_) return exact(dw);
  const double slack = 1e-9 * (hi_ - lo_);
  if (dw < lo_ - slack || dw > hi_ + slack) {
    throw Error(ErrorCode::InvalidArgument, "jsa", "detuning outside the interpolation window");
  }
  SpectralSample s;
  const double w1 = pump_.omega1(), w2 = pump_.omega2();
  s.dw = dw;
  s.omega_s = w1 + dw;
  s.omega_i = w1 + w2 - s.omega_s;
  s.k1 = k1_;
  s.k2 = k2_;
  s.ks_t = ks_t_;
  s.ki_t = ki_t_;
  for (int j = 0; j < nmodes_; ++j) {
    s.ks[j] = real_[j](dw);
    s.vs[j] = real_[2 + j](dw);
    s.ki[j] = real_[4 + j](dw);
    s.vi[j] = real_[6 + j](dw);
  }
  for (int j = 0; j < nmodes_ * nmodes_; ++j) {
    const int idx = nmodes_ == 1 ? 0 : j;
    s.I[idx] = complex_[idx](dw);
  }
  if (gratings_) {
    s.kappa_s = complex_[4](dw);
    s.kappa_i = complex_[5](dw);
  }
  return s;
}

PhotonParams photon_params(const SpectralSample& s, const GratingPair& g, const PumpConfig& pump,
                           DispersionModel model) {
  PhotonParams out;
  auto one = [&](const GratingSpec& gs, double omega, const std::array<double, 2>& k,
                 const std::array<double, 2>& v, const std::array<double, 2>& k_t, cplx kappa,
                 Direction dir, CouplingPoint& cp) {
    const double delta = gs.omega_t - omega;
    double d = 0.0, delta_env = 0.0;
    if (model == DispersionModel::SingleCount) {
      d = 0.5 * (gs.K() + k[0] - k[1]);
    } else {
      d = 0.5 * (delta * (1.0 / v[1] - 1.0 / v[0]) + gs.K() + k_t[0] - k_t[1]);
      delta_env = delta;
    }
    cp.kappa = kappa;
    cp.delta = delta;
    cp.d = d;
    cp.gamma = std::hypot(d, std::abs(kappa));
    cp.v_from = v[0];
    cp.v_to = v[1];
    cp.k_from = k[0];
    cp.k_to = k[1];
    return EnvelopeParams::make(kappa, delta_env, d, v[0], v[1], pump.L_m, dir);
  };
  out.signal = one(g.signal, s.omega_s, s.ks, s.vs, s.ks_t, s.kappa_s, Direction::Forward, out.cs);
  out.idler = one(g.idler, s.omega_i, s.ki, s.vi, s.ki_t, s.kappa_i, Direction::Backward, out.ci);
  return out;
}

double phase_mismatch(const SpectralSample& s, int ys, int yi) {
  return s.k1 - s.k2 - s.ks[ys] + s.ki[yi];
}

JsaGrid jsa_no_grating(DispersionCache& cache, const JsaChannel& channel, const PumpConfig& pump,
                       const DetuningGrid& grid, const JsaOptions& options) {
  grid.validate();
  FwmChannel probe{channel.signal, channel.idler, pump.omega1(), pump.omega2(), pump.omega1(),
                   pump.omega2()};
  if (angular_momentum_allowed(probe) == AngularMomentumRule::Forbidden) {
    throw Error(ErrorCode::ForbiddenChannel, "jsa", "channel violates angular momentum conservation");
  }
  const SpectralModel model(cache, pump, channel, std::nullopt, grid.lo, grid.hi, options);
  JsaGrid out = empty_grid(channel, pump, grid);
  parallel_for(out.detuning.size(), options.workers, [&](std::size_t j) {
    const auto s = model.at(out.detuning[j]);
    const cplx phi = s.I[0] * exp_integral(phase_mismatch(s), pump.L_m);
    out.amplitude[j] = phi;
    out.terms[j][0] = phi;
  });
  return out;
}

JsaGrid jsa_full(DispersionCache& cache, const JsaChannel& channel, const PumpConfig& pump,
                 const GratingPair& gratings, const DetuningGrid& grid,
                 const JsaOptions& options) {
  grid.validate();
  const SpectralModel model(cache, pump, channel, gratings, grid.lo, grid.hi, options);
  const EnvelopeFamily fs = signal_family(channel, gratings);
  const EnvelopeFamily fi = idler_family(channel, gratings);
  const double L = pump.L_m;
  JsaGrid out = empty_grid(channel, pump, grid);
  parallel_for(out.detuning.size(), options.workers, [&](std::size_t j) {
    const auto s = model.at(out.detuning[j]);
    const auto pp = photon_params(s, gratings, pump, options.model);
    const auto ws = envelope_waves(pp.signal, fs);
    const auto wi = envelope_waves(pp.idler, fi);
    const auto es = envelopes(pp.signal, fs);
    const auto ei = envelopes(pp.idler, fi);
    cplx total = 0.0;
    for (int ys = 0; ys < 2; ++ys) {
      for (int yi = 0; yi < 2; ++yi) {
        if (options.dominant_only && (ys != 0 || yi != 0)) continue;
        const cplx I = s.I[2 * ys + yi];
        if (I == cplx(0.0)) continue;
        const double dk = phase_mismatch(s, ys, yi);
        cplx z_int = 0.0;
        if (options.z_integration == ZIntegration::Exponential) {
          z_int = wave_integral(dk, ws[ys], wi[yi], L);
        } else {
          const double q = max_rate(dk, ws[ys], wi[yi]);
          const int pieces = std::clamp(static_cast<int>(std::ceil(q * L / kPi)), 1, 4000);
          std::vector<double> cuts;
          for (int p = 1; p < pieces; ++p) cuts.push_back(L * p / pieces);
          auto f = [&](double z) {
            return std::polar(1.0, dk * z) * std::conj(pick(es(z), ys)) *
                   std::conj(pick(ei(z), yi));
          };
          try {
            z_int = integrate(f, 0.0, L, options.z_quad, cuts);
          } catch (const QuadratureError& e) {
            throw Error(ErrorCode::QuadratureFailure, "jsa", e.what());
          }
        }
        out.terms[j][2 * ys + yi] = I * z_int;
        total += I * z_int;
      }
    }
    out.amplitude[j] = total;
  });
  return out;
}

std::array<JsaGrid, 4> jsa_ideal_components(DispersionCache& cache, const JsaChannel& source,
                                            const PumpConfig& pump, double kappa_s,
                                            double kappa_i, const DetuningGrid& grid,
                                            const JsaOptions& options) {
  grid.validate();
  pump.validate();
  check_channel_directions(source);
  const double L = pump.L_m;
  std::array<JsaGrid, 4> out;
  for (auto& g : out) {
    g = empty_grid(source, pump, grid);
    g.normalization_reference = "overlap factor I omitted; Gamma = 1";
  }
  const double k1 = cache.get(kPump, pump.omega1()).k;
  const double k2 = cache.get(kPump, pump.omega2()).k;
  const ModeLabel ms = hybrid_partner(source.signal), mi = hybrid_partner(source.idler);
  // cos / sin of kappa_s (L - z) and of kappa_i z
  const Waves cs = trig(1.0, 0.0, kappa_s, L, true);
  const Waves ss = trig(0.0, kappa_s, kappa_s, L, true);
  const Waves ci = trig(1.0, 0.0, kappa_i, L, false);
  const Waves si = trig(0.0, kappa_i, kappa_i, L, false);
  auto conj_waves = [](Waves w) {
    for (auto& x : w) {
      x.c = std::conj(x.c);
      x.q = -x.q;
    }
    return w;
  };
  // wave_integral conjugates its inputs; pre-conjugate so the trig factors enter as is
  const std::array<std::pair<Waves, Waves>, 4> parts = {
      std::pair{conj_waves(cs), conj_waves(ci)}, std::pair{conj_waves(cs), conj_waves(si)},
      std::pair{conj_waves(ss), conj_waves(ci)}, std::pair{conj_waves(ss), conj_waves(si)}};
  parallel_for(static_cast<std::size_t>(grid.points), options.workers, [&](std::size_t j) {
    const double dk = k1 - k2 - cache.get(ms, out[0].omega_s[j]).k + cache.get(mi, out[0].omega_i[j]).k;
    for (int c = 0; c < 4; ++c) {
      const cplx v = wave_integral(dk, parts[c].first, parts[c].second, L);
      out[c].amplitude[j] = v;
      out[c].terms[j][0] = v;
    }
  });
  return out;
}

DetuningGrid suggested_grid(DispersionCache& cache, const JsaChannel& channel,
                            const PumpConfig& pump, const std::optional<GratingPair>& gratings,
                            const JsaOptions& options, double lobes_margin,
                            double points_per_lobe) {
  if (!(lobes_margin > 0.0) || !(points_per_lobe >= 2.0)) {
    throw Error(ErrorCode::InvalidArgument, "jsa", "need lobes_margin > 0 and points_per_lobe >= 2");
  }
  JsaOptions exact = options;
  exact.chebyshev_nodes = 0;
  const SpectralModel model(cache, pump, channel, gratings, 0.0, 0.0, exact);
  const auto s = model.at(0.0);
  double slope = 1.0 / s.vs[0] + 1.0 / s.vi[0];
  if (gratings && options.model == DispersionModel::Literal) slope *= 2.0;
  std::vector<double> centres;
  double span = 0.0;
  if (gratings) {
    const auto pp = photon_params(s, *gratings, pump, options.model);
    span = pp.signal.gamma + pp.idler.gamma;
    for (int ys = 0; ys < 2; ++ys)
      for (int yi = 0; yi < 2; ++yi) centres.push_back(phase_mismatch(s, ys, yi) / slope);
  } else {
    centres.push_back(phase_mismatch(s) / slope);
  }
  const double lobe = 2.0 * kPi / (pump.L_m * slope);
  const auto [cmin, cmax] = std::minmax_element(centres.begin(), centres.end());
  DetuningGrid g;
  g.lo = *cmin - span / slope - lobes_margin * lobe;
  g.hi = *cmax + span / slope + lobes_margin * lobe;
  g.points = static_cast<int>(std::ceil((g.hi - g.lo) / (lobe / points_per_lobe))) + 1;
  return g;
}

PairRatioResult pair_ratio(DispersionCache& cache, const JsaChannel& channel_mp,
                           const PumpConfig& pump, const GratingPair& gratings,
                           const DetuningGrid& initial, const JsaOptions& options,
                           double tail_fraction, int max_widenings) {
  initial.validate();
  if (channel_mp.signal != gratings.signal.to || channel_mp.idler != gratings.idler.to) {
    throw Error(ErrorCode::InvalidArgument, "jsa", "pair_ratio expects the converted (m', -m') channel");
  }
  DetuningGrid grid = initial;
  for (int w = 0;; ++w) {
    const JsaGrid num = jsa_full(cache, channel_mp, pump, gratings, grid, options);
    const JsaGrid den = jsa_no_grating(cache, channel_mp, pump, grid, options);
    if (tails_converged(num.jsi(), tail_fraction) && tails_converged(den.jsi(), tail_fraction)) {
      PairRatioResult r;
      r.numerator = num.integrated_jsi();
      r.denominator = den.integrated_jsi();
      if (r.denominator == 0.0) {
        throw Error(ErrorCode::ForbiddenChannel, "jsa", "no-grating channel has zero amplitude");
      }
      r.ratio = r.numerator / r.denominator;
      r.grid = grid;
      r.widenings = w;
      return r;
    }
    if (w == max_widenings) {
      throw Error(ErrorCode::GridTooNarrow, "jsa", "JSI tails above threshold after widening");
    }
    const double step = grid.step();
    const double c = 0.5 * (grid.lo + grid.hi);
    const int half = static_cast<int>(std::ceil(0.75 * (grid.hi - grid.lo) / step));
    grid.lo = c - half * step;
    grid.hi = c + half * step;
    grid.points = 2 * half + 1;
  }
}

double bell_fidelity(cplx A, cplx B) {
  const double den = std::sqrt(2.0 * (std::norm(A) + std::norm(B)));
  if (den == 0.0) return 0.0;
  return std::min(1.0, std::abs(A + B) / den);
}

double bell_fidelity(double A, double B) { return bell_fidelity(cplx(A), cplx(B)); }

FidelityResult bell_fidelity(DispersionCache& cache, const PumpConfig& pump, int m_s, int m_i,
                             double dw, const QuadratureSpec& quad) {
  pump.validate();
  if (m_s < 1 || m_i < 1) throw Error(ErrorCode::InvalidArgument, "jsa", "m_s, m_i must be >= 1");
  const double w1 = pump.omega1(), w2 = pump.omega2();
  const double ws = w1 + dw, wi = w1 + w2 - ws;
  const OamLabel sp{m_s, Sam::Plus}, sm{m_s, Sam::Minus};
  const OamLabel im{-m_i, Sam::Minus, 1, Direction::Backward};
  const OamLabel ip{-m_i, Sam::Plus, 1, Direction::Backward};
  FidelityResult r;
  // O+1^- and O-1^+ are the TE/TM-built modes; accepted here for the B channel
  r.A = fwm_overlap(cache, {sp, im, ws, wi, w1, w2}, quad, true);
  r.B = fwm_overlap(cache, {sm, ip, ws, wi, w1, w2}, quad, true);
  r.fidelity = bell_fidelity(r.A, r.B);
  return r;
}

double PeakReport::spread() const {
  if (!centre) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (const auto& r : roots)
    if (r) s = std::max(s, std::abs(*r - *centre));
  return s;
}

double effective_mismatch(const SpectralModel& model, double dw, DispersionModel dm) {
  if (!model.has_gratings()) return phase_mismatch(model.at(dw));
  const auto s = model.at(dw);
  const auto pp = photon_params(s, *model.gratings(), model.pump(), dm);
  return phase_mismatch(s) + pp.signal.d + pp.signal.delta / pp.signal.v_g_m - pp.idler.d -
         pp.idler.delta / pp.idler.v_g_m;
}

PeakReport peak_positions(DispersionCache& cache, const JsaChannel& channel,
                          const PumpConfig& pump, const GratingPair& gratings,
                          const DetuningGrid& grid, const JsaOptions& options) {
  grid.validate();
  const SpectralModel model(cache, pump, channel, gratings, grid.lo, grid.hi, options);
  const int n = grid.points;
  std::vector<double> eff(n), gs(n), gi(n);
  parallel_for(static_cast<std::size_t>(n), options.workers, [&](std::size_t j) {
    const double dw = grid.at(static_cast<int>(j));
    const auto s = model.at(dw);
    const auto pp = photon_params(s, gratings, pump, options.model);
    eff[j] = phase_mismatch(s) + pp.signal.d + pp.signal.delta / pp.signal.v_g_m - pp.idler.d -
             pp.idler.delta / pp.idler.v_g_m;
    gs[j] = pp.signal.gamma;
    gi[j] = pp.idler.gamma;
  });
  auto solve = [&](double s1, double s2) -> std::optional<double> {
    auto f = [&](double dw) {
      const auto s = model.at(dw);
      const auto pp = photon_params(s, gratings, pump, options.model);
      return phase_mismatch(s) + pp.signal.d + pp.signal.delta / pp.signal.v_g_m - pp.idler.d -
             pp.idler.delta / pp.idler.v_g_m + s1 * pp.signal.gamma + s2 * pp.idler.gamma;
    };
    for (int j = 0; j + 1 < n; ++j) {
      const double a = eff[j] + s1 * gs[j] + s2 * gi[j];
      const double b = eff[j + 1] + s1 * gs[j + 1] + s2 * gi[j + 1];
      if (a == 0.0) return grid.at(j);
      if (std::signbit(a) != std::signbit(b)) {
        return find_root(f, RootSpec{grid.at(j), grid.at(j + 1), 1e-14});
      }
    }
    return std::nullopt;
  };
  PeakReport r;
  const std::array<std::pair<double, double>, 4> signs = {
      std::pair{1.0, 1.0}, std::pair{1.0, -1.0}, std::pair{-1.0, 1.0}, std::pair{-1.0, -1.0}};
  const char* names[4] = {"(+,+)", "(+,-)", "(-,+)", "(-,-)"};
  for (int c = 0; c < 4; ++c) {
    r.roots[c] = solve(signs[c].first, signs[c].second);
    if (!r.roots[c]) r.missing.push_back(std::string("NoRootInWindow ") + names[c]);
  }
  r.centre = solve(0.0, 0.0);
  if (!r.centre) r.missing.push_back("NoRootInWindow centre");
  return r;
}

}  // namespace oamfwm
