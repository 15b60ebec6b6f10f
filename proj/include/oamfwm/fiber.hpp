#pragma once

#include <oamfwm/numerics.hpp>

#include <array>
#include <map>
#include <memory>
#include <shared_mutex>
#include <tuple>
#include <vector>

namespace oamfwm {

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kPi = 3.14159265358979323846;

// Wavelength in micrometres -> angular frequency in rad/s.
double omega_from_wavelength_um(double lambda_um);
double wavelength_um_from_omega(double omega);

struct FiberSpec {
  double n_co = 1.45;
  double n_cl = 1.44;
  double a_um = 20.0;

  void validate() const;
  double eps_co() const { return n_co * n_co; }
  double eps_cl() const { return n_cl * n_cl; }
};

enum class Family { HE, EH, TE, TM };
enum class Parity { Even, Odd };

const char* to_string(Family f);

struct ModeLabel {
  Family family = Family::HE;
  int m = 1;
  int n = 1;
  Parity parity = Parity::Even;

  void validate() const;
};

struct DispersionPoint {
  Family family = Family::HE;
  int m = 1;
  double omega = 0.0;
  double n_eff = 0.0;
  double k = 0.0;    // rad/m
  double u = 0.0;    // rad/m
  double w = 0.0;    // rad/m
  double s = 0.0;    // +inf for TE
  double v_g = 0.0;  // m/s
  double U = 0.0;
  double W = 0.0;
  double V = 0.0;
  double residual = 0.0;
};

double v_parameter(const FiberSpec& fiber, double wavelength_um);

// Pole-free characteristic function of one branch in the variable U.
// Roots of this function are the guided modes of the branch.
double characteristic(const FiberSpec& fiber, Family family, int m, double V, double U);

// All roots of a branch (ascending U), i.e. radial orders n = 1, 2, ...
std::vector<double> branch_roots(const FiberSpec& fiber, Family family, int m, double omega);

DispersionPoint solve_mode(const FiberSpec& fiber, const ModeLabel& label, double omega);

// Same as solve_mode, but brackets the root next to U_hint first; used for
// continuation along frequency sweeps so branches never swap.
DispersionPoint solve_mode_near(const FiberSpec& fiber, const ModeLabel& label, double omega,
                                double U_hint);

// Thread-safe memo of (family, m, omega) -> DispersionPoint.
class DispersionCache {
 public:
  explicit DispersionCache(FiberSpec fiber) : fiber_(fiber) { fiber_.validate(); }

  const FiberSpec& fiber() const { return fiber_; }
  DispersionPoint get(const ModeLabel& label, double omega);
  std::size_t size() const;

 private:
  using Key = std::tuple<int, int, double>;
  FiberSpec fiber_;
  mutable std::shared_mutex mutex_;
  std::map<Key, DispersionPoint> table_;
  std::map<std::pair<int, int>, std::vector<std::pair<double, double>>> anchors_;
};

using Vec3 = std::array<cplx, 3>;

// Field profile of one hybrid mode (or TE/TM), angular factors stripped.
// Radius is taken in micrometres; rho = r / a is used internally.
class RadialProfile {
 public:
  RadialProfile() = default;
  RadialProfile(const FiberSpec& fiber, const DispersionPoint& point);

  Vec3 e(double r_um) const { return e_rho(r_um / a_um_); }
  Vec3 h(double r_um) const { return h_rho(r_um / a_um_); }

  // Electric field (e_r, e_phi, e_z) at rho = r / a, scaled.
  Vec3 e_rho(double rho) const;
  // Magnetic field times the vacuum impedance, same angular convention.
  Vec3 h_rho(double rho) const;

  // Flux density (1/n_eff) Re(e_r conj(h_phi) - e_phi conj(h_r)) at rho.
  double flux_density(double rho) const;
  // Longitudinal flux with the angular average of the even hybrid mode
  // (pi for m >= 1, 2 pi for m = 0), area in units of a^2.
  double flux(const QuadratureSpec& quad = {}) const;
  // Truncation radius (units of a) where the cladding profile has decayed
  // below 1e-16 of its r = a value.
  double rho_cut() const { return rho_cut_; }

  double normalization_constant() const { return scale_; }
  RadialProfile scaled(double factor) const;

  const DispersionPoint& point() const { return point_; }
  double a_um() const { return a_um_; }

 private:
  DispersionPoint point_;
  double a_um_ = 1.0;
  double n_co_ = 1.0, n_cl_ = 1.0;
  double jm_a_ = 1.0, km_a_ = 1.0;  // J_m(U), K_m(W) (or J_0, K_0 for TE)
  double beta_a_ = 0.0, k0_a_ = 0.0;
  double scale_ = 1.0;
  double rho_cut_ = 10.0;
};

RadialProfile radial_profile(const FiberSpec& fiber, const DispersionPoint& point,
                             const ModeLabel& label);

RadialProfile poynting_normalize(const RadialProfile& profile, const DispersionPoint& point,
                                 const QuadratureSpec& quad = {});

// Integrate f(rho) * rho over [0, rho_cut] split at the core boundary.
template <class F>
auto integrate_radial(F&& f, double rho_cut, const QuadratureSpec& quad) {
  auto g = [&](double rho) { return f(rho) * rho; };
  return integrate(g, 0.0, 1.0, quad) + integrate(g, 1.0, rho_cut, quad);
}

}  // namespace oamfwm
