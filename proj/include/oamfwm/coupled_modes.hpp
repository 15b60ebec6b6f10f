#pragma once

#include <oamfwm/oam.hpp>

#include <utility>
#include <vector>

namespace oamfwm {

enum class EnvelopeFamily { SignalOutM, SignalOutMp, IdlerOutM, IdlerOutMp };
const char* to_string(EnvelopeFamily f);

struct EnvelopeParams {
  cplx kappa{};
  double delta = 0.0;  // rad/s
  double d = 0.0;      // 1/m
  double gamma = 0.0;  // 1/m
  double v_g_m = 1.0;
  double v_g_mp = 1.0;
  double L = 1.0;
  Direction direction = Direction::Forward;

  static EnvelopeParams make(cplx kappa, double delta, double d, double v_m, double v_mp,
                             double L, Direction dir);
  void validate() const;
  // Delta = k' - k - K implied by d and delta.
  double mismatch() const { return delta * (1.0 / v_g_mp - 1.0 / v_g_m) - 2.0 * d; }
};

using AmplitudePair = std::pair<cplx, cplx>;  // (amplitude on m, amplitude on m')

struct EnvelopeSolution {
  EnvelopeFamily family;
  EnvelopeParams params;

  AmplitudePair operator()(double z) const;
};

EnvelopeSolution envelopes(const EnvelopeParams& params, EnvelopeFamily family);

struct SampledSolution {
  std::vector<double> z;
  std::vector<AmplitudePair> a;
};

// Classical RK4 on the coupled-mode system; signal families are integrated
// from z = L down to 0, idler families from 0 up to L.
SampledSolution ode_oracle(const EnvelopeParams& params, EnvelopeFamily family, int steps);

}  // namespace oamfwm
