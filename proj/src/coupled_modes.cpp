#include <oamfwm/coupled_modes.hpp>

#include <cmath>

namespace oamfwm {

const char* to_string(EnvelopeFamily f) {
  switch (f) {
    case EnvelopeFamily::SignalOutM: return "signal_out_m";
    case EnvelopeFamily::SignalOutMp: return "signal_out_mp";
    case EnvelopeFamily::IdlerOutM: return "idler_out_m";
    case EnvelopeFamily::IdlerOutMp: return "idler_out_mp";
  }
  return "?";
}

EnvelopeParams EnvelopeParams::make(cplx kappa, double delta, double d, double v_m, double v_mp,
                                    double L, Direction dir) {
  EnvelopeParams p;
  p.kappa = kappa;
  p.delta = delta;
  p.d = d;
  p.gamma = std::hypot(d, std::abs(kappa));
  p.v_g_m = v_m;
  p.v_g_mp = v_mp;
  p.L = L;
  p.direction = dir;
  p.validate();
  return p;
}

void EnvelopeParams::validate() const {
  if (!(L > 0.0)) throw Error(ErrorCode::InvalidArgument, "coupled_modes", "L must be > 0");
  if (!(v_g_m > 0.0) || !(v_g_mp > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "coupled_modes", "group velocities must be > 0");
  }
  const double g = std::hypot(d, std::abs(kappa));
  if (std::abs(gamma - g) > 1e-12 * std::max(1.0, g)) {
    throw Error(ErrorCode::InvalidArgument, "coupled_modes", "gamma must equal sqrt(d^2 + |kappa|^2)");
  }
}

namespace {

// sin(g x) / g, continuous at g = 0
double sin_over(double g, double x) {
  if (g == 0.0) return x;
  return std::sin(g * x) / g;
}

bool is_signal(EnvelopeFamily f) {
  return f == EnvelopeFamily::SignalOutM || f == EnvelopeFamily::SignalOutMp;
}

}  // namespace

AmplitudePair EnvelopeSolution::operator()(double z) const {
  const auto& p = params;
  const cplx I(0.0, 1.0);
  const double g = p.gamma, d = p.d, dl = p.delta, L = p.L;
  const double v = p.v_g_m, vp = p.v_g_mp;
  switch (family) {
    case EnvelopeFamily::SignalOutM: {
      const double x = L - z;
      const double S = sin_over(g, x);
      const cplx lo = std::exp(I * x * (d + dl / v)) * (std::cos(g * x) - I * d * S);
      const cplx hi = -I * std::conj(p.kappa) * S *
                      std::exp(I * ((L + z) * d - dl * (z / vp - L / v)));
      return {lo, hi};
    }
    case EnvelopeFamily::SignalOutMp: {
      const double x = L - z;
      const double S = sin_over(g, x);
      const cplx lo = -I * p.kappa * S * std::exp(-I * (d * (L + z) - dl * (L / vp - z / v)));
      const cplx hi = std::exp(I * x * (-d + dl / vp)) * (std::cos(g * x) + I * d * S);
      return {lo, hi};
    }
    case EnvelopeFamily::IdlerOutM: {
      const double S = sin_over(g, z);
      const cplx lo = std::exp(I * z * (d + dl / v)) * (std::cos(g * z) - I * d * S);
      const cplx hi = -I * std::conj(p.kappa) * S * std::exp(-I * z * (d - dl / vp));
      return {lo, hi};
    }
    case EnvelopeFamily::IdlerOutMp: {
      const double S = sin_over(g, z);
      const cplx lo = -I * p.kappa * S * std::exp(I * z * (d + dl / v));
      const cplx hi = std::exp(-I * z * (d - dl / vp)) * (std::cos(g * z) + I * d * S);
      return {lo, hi};
    }
  }
  return {};
}

EnvelopeSolution envelopes(const EnvelopeParams& params, EnvelopeFamily family) {
  params.validate();
  const bool fwd = params.direction == Direction::Forward;
  if (fwd != is_signal(family)) {
    throw Error(ErrorCode::DirectionMismatch, "coupled_modes",
                "signal families are forward, idler families backward");
  }
  return {family, params};
}

SampledSolution ode_oracle(const EnvelopeParams& p, EnvelopeFamily family, int steps) {
  p.validate();
  if (steps < 1000) throw Error(ErrorCode::InvalidArgument, "coupled_modes", "steps must be >= 1000");
  const bool signal = is_signal(family);
  const double D = p.mismatch();
  const cplx I(0.0, 1.0);
  const double r1 = p.delta / p.v_g_m, r2 = p.delta / p.v_g_mp;
  auto rhs = [&](double z, const AmplitudePair& a) -> AmplitudePair {
    if (signal) {
      return {-I * (r1 * a.first - p.kappa * a.second * std::exp(I * D * z)),
              -I * (r2 * a.second - std::conj(p.kappa) * a.first * std::exp(-I * D * z))};
    }
    return {I * (r1 * a.first - p.kappa * a.second * std::exp(-I * D * z)),
            I * (r2 * a.second - std::conj(p.kappa) * a.first * std::exp(I * D * z))};
  };
  const bool out_m = family == EnvelopeFamily::SignalOutM || family == EnvelopeFamily::IdlerOutM;
  AmplitudePair y = out_m ? AmplitudePair{1.0, 0.0} : AmplitudePair{0.0, 1.0};
  const double h = (signal ? -p.L : p.L) / steps;
  double z = signal ? p.L : 0.0;
  SampledSolution out;
  out.z.resize(steps + 1);
  out.a.resize(steps + 1);
  auto store = [&](int k) {
    const int idx = signal ? steps - k : k;
    out.z[idx] = z;
    out.a[idx] = y;
  };
  auto axpy = [](const AmplitudePair& a, double s, const AmplitudePair& b) {
    return AmplitudePair{a.first + s * b.first, a.second + s * b.second};
  };
  store(0);
  for (int k = 1; k <= steps; ++k) {
    const auto k1 = rhs(z, y);
    const auto k2 = rhs(z + 0.5 * h, axpy(y, 0.5 * h, k1));
    const auto k3 = rhs(z + 0.5 * h, axpy(y, 0.5 * h, k2));
    const auto k4 = rhs(z + h, axpy(y, h, k3));
    y.first += h / 6.0 * (k1.first + 2.0 * k2.first + 2.0 * k3.first + k4.first);
    y.second += h / 6.0 * (k1.second + 2.0 * k2.second + 2.0 * k3.second + k4.second);
    z = (signal ? p.L : 0.0) + k * h;
    store(k);
  }
  // pin the far endpoint to the exact grid value
  out.z[signal ? 0 : steps] = signal ? 0.0 : p.L;
  return out;
}

}  // namespace oamfwm
