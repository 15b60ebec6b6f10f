#pragma once

#include <oamfwm/jsa.hpp>

#include <optional>
#include <string>
#include <vector>

namespace oamfwm {

// Location-carrying config error; path is dotted ("gratings[0].period").
class ConfigError : public Error {
 public:
  ConfigError(std::string path, int line, int column, const std::string& message);

  const std::string& path() const noexcept { return path_; }
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  std::string path_;
  int line_, column_;
};

// Quantities with explicit unit suffixes.
double parse_length_m(const std::string& text);      // "20 um", "0.5um", "2 cm", "500 nm"
double parse_detuning_rad_s(const std::string& text);  // "3 THz" (x 2 pi), "1e12 rad/s"

struct GratingConfig {
  Photon photon = Photon::Signal;
  OamLabel from, to;
  double delta_eps0 = 0.0;
  std::optional<double> period_m;  // empty: resonant period at the resonance wavelength
  double resonance_wavelength_m = 0.0;
};

struct GridConfig {
  bool automatic = true;
  DetuningGrid grid;
};

struct JsaSettings {
  bool dominant_only = false;
  DispersionModel model = DispersionModel::SingleCount;
  ZIntegration z_integration = ZIntegration::Adaptive;
  int chebyshev_nodes = 24;
  double tail_fraction = 1e-6;
};

struct RunConfig {
  FiberSpec fiber;
  PumpConfig pump;
  std::vector<GratingConfig> gratings;
  std::vector<JsaChannel> channels;
  GridConfig grid;
  QuadratureSpec tolerances;
  JsaSettings jsa;
  int max_m = 4;                 // overlap and fidelity tables
  double fidelity_detuning = 0.0;  // delta filter position, rad/s
  std::string out_dir = "out";
  std::string format = "csv";
};

// Strict parse: unknown keys, missing fields and bad units are errors.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Canonical JSON text (sorted keys, lengths in um, detunings in rad/s).
std::string canonical_config(const RunConfig& config);

// Resolved grating pair (signal, idler) if the config has both.
std::optional<GratingPair> build_gratings(DispersionCache& cache, const RunConfig& config);
GratingSpec build_grating(DispersionCache& cache, const GratingConfig& g);

JsaOptions jsa_options(const RunConfig& config, int workers);

}  // namespace oamfwm
