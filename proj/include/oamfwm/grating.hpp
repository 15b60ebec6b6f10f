#pragma once

#include <oamfwm/oam.hpp>

namespace oamfwm {

enum class Photon { Signal, Idler };

// Helical permittivity modulation Delta eps0 * cos(K z - m_g phi) in the core.
// The resonance target (from, to, omega_t) fixes the detuning reference.
struct GratingSpec {
  int charge = 2;               // m_g
  double period_m = 1e-3;       // Lambda_t
  double delta_eps0 = 2.9e-2;
  Photon target = Photon::Signal;
  OamLabel from{1, Sam::Plus};
  OamLabel to{3, Sam::Plus};
  double omega_t = 0.0;
  // Sign of K; resonance between a lower and a higher order mode needs
  // K = k_to - k_from < 0 when the target mode is the slower one.
  int orientation = -1;

  void validate() const;
  double K() const;
};

struct CouplingPoint {
  cplx kappa{};
  double delta = 0.0;  // omega_t - omega
  double d = 0.0;
  double gamma = 0.0;
  double v_from = 0.0, v_to = 0.0;
  double k_from = 0.0, k_to = 0.0;
};

bool coupling_allowed(int m, Sam sigma, int mp, Sam sigma_p, int m_g);

// kappa = Delta eps0 omega / (4 n_eff(from) c) * Int_core conj(O_from) . O_to exp(-i m_g phi).
cplx coupling_constant(DispersionCache& cache, const GratingSpec& g, const OamLabel& from,
                       const OamLabel& to, double omega, const QuadratureSpec& quad = {});

// The dimensionless core overlap alone (kappa without the prefactor).
cplx coupling_overlap(DispersionCache& cache, int m_g, const OamLabel& from, const OamLabel& to,
                      double omega, const QuadratureSpec& quad = {});

double resonant_period(DispersionCache& cache, const OamLabel& from, const OamLabel& to,
                       double omega_t);

// Builds a grating in resonance with (from -> to) at omega_t.
GratingSpec resonant_grating(DispersionCache& cache, const OamLabel& from, const OamLabel& to,
                             double omega_t, double delta_eps0, Photon target);

// delta = omega_t - omega, 2d = delta (1/v_to - 1/v_from) + K + k_from - k_to, gamma.
CouplingPoint detunings(DispersionCache& cache, const GratingSpec& g, const OamLabel& from,
                        const OamLabel& to, double omega, const QuadratureSpec& quad = {});

}  // namespace oamfwm
