#pragma once

#include <oamfwm/coupled_modes.hpp>
#include <oamfwm/grating.hpp>
#include <oamfwm/overlap.hpp>

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace oamfwm {

// Two CW pumps in HE11 (even); pump 1 forward at lambda1, pump 2 backward at lambda2.
struct PumpConfig {
  double lambda1_um = 1.5;
  double lambda2_um = 0.5;
  double L_m = 0.02;

  void validate() const;
  double omega1() const { return omega_from_wavelength_um(lambda1_um); }
  double omega2() const { return omega_from_wavelength_um(lambda2_um); }
};

// Output-mode pair: forward signal, backward idler.
struct JsaChannel {
  OamLabel signal{1, Sam::Plus};
  OamLabel idler{-1, Sam::Minus, 1, Direction::Backward};

  std::string name() const;
};

// Uniform grid of Delta omega = omega_s - omega_1 (rad/s).
struct DetuningGrid {
  double lo = -1e12;
  double hi = 1e12;
  int points = 2001;

  void validate() const;
  double step() const { return (hi - lo) / (points - 1); }
  double at(int j) const { return j == points - 1 ? hi : lo + j * step(); }
};

struct GratingPair {
  GratingSpec signal;
  GratingSpec idler;
};

// Signal O+1^+ -> O+m'^+ resonant at omega_1, idler O-1^- -> O-m'^- resonant at omega_2.
GratingPair resonant_gratings(DispersionCache& cache, const PumpConfig& pump, int m_prime,
                              double delta_eps0);

// How the frequency detuning enters the grating-coupled amplitudes.
//  SingleCount: wavenumbers at the actual frequencies carry the dispersion;
//               envelope phases use delta = 0 (d keeps its delta term).
//  Literal:     envelope phases use delta as printed, on top of k(omega).
enum class DispersionModel { SingleCount, Literal };
// How Int_0^L dz is evaluated.
enum class ZIntegration { Adaptive, Exponential };

const char* to_string(DispersionModel m);
const char* to_string(ZIntegration z);

struct JsaOptions {
  bool dominant_only = false;
  DispersionModel model = DispersionModel::SingleCount;
  ZIntegration z_integration = ZIntegration::Adaptive;
  QuadratureSpec quad{};
  QuadratureSpec z_quad{1e-9, 1e-14, 20000};
  // Smooth omega dependence (k, v_g, kappa, I) is interpolated on this many
  // Chebyshev nodes across the grid; 0 solves every grid point exactly.
  int chebyshev_nodes = 24;
  int workers = 1;
};

struct JsaGrid {
  JsaChannel channel;
  std::vector<double> detuning;  // Delta omega
  std::vector<double> omega_s;
  std::vector<double> omega_i;   // omega_1 + omega_2 - omega_s
  std::vector<cplx> amplitude;
  // Per-term breakdown, (y_s, y_i) = (from,from), (from,to), (to,from), (to,to).
  std::vector<std::array<cplx, 4>> terms;
  std::string normalization_reference = "none";

  std::vector<double> jsi() const;
  double max_jsi() const;
  double integrated_jsi() const;  // trapezoid of |Phi|^2 over Delta omega
};

// Omega-dependent inputs of the JSA at one detuning.
struct SpectralSample {
  double dw = 0.0;
  double omega_s = 0.0, omega_i = 0.0;
  double k1 = 0.0, k2 = 0.0;
  std::array<double, 2> ks{}, vs{};  // signal (from, to) or output mode in slot 0
  std::array<double, 2> ki{}, vi{};  // idler  (from, to)
  std::array<double, 2> ks_t{}, ki_t{};  // (from, to) at the grating resonance frequency
  std::array<cplx, 4> I{};           // (from,from), (from,to), (to,from), (to,to)
  cplx kappa_s{}, kappa_i{};
};

// Samples k, v_g, kappa and I either exactly or from Chebyshev interpolants.
class SpectralModel {
 public:
  // Without gratings: slot 0 of each photon is the output mode itself.
  SpectralModel(DispersionCache& cache, const PumpConfig& pump, const JsaChannel& channel,
                const std::optional<GratingPair>& gratings, double lo, double hi,
                const JsaOptions& options);

  SpectralSample at(double dw) const;
  bool has_gratings() const { return gratings_.has_value(); }
  const std::optional<GratingPair>& gratings() const { return gratings_; }
  const PumpConfig& pump() const { return pump_; }

 private:
  SpectralSample exact(double dw) const;

  DispersionCache* cache_;
  PumpConfig pump_;
  JsaChannel channel_;
  std::optional<GratingPair> gratings_;
  JsaOptions opt_;
  std::array<OamLabel, 2> sig_{}, idl_{};
  int nmodes_ = 1;
  double lo_ = 0.0, hi_ = 0.0;
  double k1_ = 0.0, k2_ = 0.0;
  std::array<double, 2> ks_t_{}, ki_t_{};
  bool interpolated_ = false;
  std::vector<Chebyshev<double>> real_;   // ks0, ks1, vs0, vs1, ki0, ki1, vi0, vi1
  std::vector<Chebyshev<cplx>> complex_;  // I0..I3, kappa_s, kappa_i
};

// Envelope parameters of both photons at one sample.
struct PhotonParams {
  EnvelopeParams signal, idler;
  CouplingPoint cs, ci;
};
PhotonParams photon_params(const SpectralSample& s, const GratingPair& g, const PumpConfig& pump,
                           DispersionModel model);

// Phase mismatch k1 - k2 - k_s(y_s) + k_i(y_i) for the (from, from) pair.
double phase_mismatch(const SpectralSample& s, int ys = 0, int yi = 0);

JsaGrid jsa_no_grating(DispersionCache& cache, const JsaChannel& channel, const PumpConfig& pump,
                       const DetuningGrid& grid, const JsaOptions& options = {});

JsaGrid jsa_full(DispersionCache& cache, const JsaChannel& channel, const PumpConfig& pump,
                 const GratingPair& gratings, const DetuningGrid& grid,
                 const JsaOptions& options = {});

// Ideal delta = d = 0 closed forms for the (from, from) source term:
// I Int exp(i dk z) {cc, cs, sc, ss}[kappa_s (L - z)][kappa_i z] dz.
std::array<JsaGrid, 4> jsa_ideal_components(DispersionCache& cache, const JsaChannel& source,
                                            const PumpConfig& pump, double kappa_s,
                                            double kappa_i, const DetuningGrid& grid,
                                            const JsaOptions& options = {});

struct PairRatioResult {
  double ratio = 0.0;
  double numerator = 0.0;
  double denominator = 0.0;
  DetuningGrid grid;
  int widenings = 0;
};

// Grid whose cell resolves the phase-matching lobes and whose window covers
// every peak of the grating and no-grating JSAs of this channel.
DetuningGrid suggested_grid(DispersionCache& cache, const JsaChannel& channel,
                            const PumpConfig& pump, const std::optional<GratingPair>& gratings,
                            const JsaOptions& options, double lobes_margin = 40.0,
                            double points_per_lobe = 4.0);

PairRatioResult pair_ratio(DispersionCache& cache, const JsaChannel& channel_mp,
                           const PumpConfig& pump, const GratingPair& gratings,
                           const DetuningGrid& initial, const JsaOptions& options = {},
                           double tail_fraction = 1e-6, int max_widenings = 12);

// |A + B| / sqrt(2 (|A|^2 + |B|^2)); 0 when both vanish.
double bell_fidelity(cplx A, cplx B);
double bell_fidelity(double A, double B);

struct FidelityResult {
  double fidelity = 0.0;
  cplx A{}, B{};
};
// A = I(O+ms^+, O-mi^-), B = I(O+ms^-, O-mi^+) evaluated at omega_s = omega_1 + dw.
FidelityResult bell_fidelity(DispersionCache& cache, const PumpConfig& pump, int m_s, int m_i,
                             double dw = 0.0, const QuadratureSpec& quad = {});

struct PeakReport {
  // Roots of dk_eff + s1 gamma_s + s2 gamma_i for (s1, s2) = (+,+), (+,-), (-,+), (-,-).
  std::array<std::optional<double>, 4> roots;
  std::optional<double> centre;  // root of dk_eff
  std::vector<std::string> missing;
  double spread() const;         // max |root - centre|
};

// Effective phase slope of the dominant term, dk_eff(dw).
double effective_mismatch(const SpectralModel& model, double dw, DispersionModel dm);

PeakReport peak_positions(DispersionCache& cache, const JsaChannel& channel,
                          const PumpConfig& pump, const GratingPair& gratings,
                          const DetuningGrid& grid, const JsaOptions& options = {});

}  // namespace oamfwm
