#pragma once

#include <oamfwm/azimuthal.hpp>
#include <oamfwm/fiber.hpp>

#include <string>
#include <vector>

namespace oamfwm {

enum class Sam { Plus, Minus };
enum class Direction { Forward, Backward };

inline int sign_of(Sam s) { return s == Sam::Plus ? +1 : -1; }
const char* to_string(Sam s);

// O_{charge}^{sam}; the radial index is fixed to 1.
struct OamLabel {
  int charge = 1;
  Sam sam = Sam::Plus;
  int n = 1;
  Direction dir = Direction::Forward;

  // Counter-rotating |charge| = 1 is built from TE/TM and refused unless allowed.
  void validate(bool allow_unstable = false) const;
  bool co_rotating() const;
  // Exponent l of exp(i l phi): charge + sam.
  int phase_charge() const { return charge + sign_of(sam); }
  // Sign used in the (e_r, -i*sgn*e_phi, e_z) construction.
  int handedness() const;
  std::string name() const;
  bool operator==(const OamLabel&) const = default;
};

ModeLabel hybrid_partner(const OamLabel& label);

// Complex vector field (radial parts times angular factors), Poynting-normalized.
// A profile is a sum of one or two solved modes (two for the TE/TM composite).
class VectorModeProfile {
 public:
  struct Part {
    RadialProfile profile;
    Vec3 ce;  // multiplies (e_r, e_phi, e_z)
    Vec3 ch;  // multiplies (h_r, h_phi, h_z), already divided by n_eff
  };

  VectorModeProfile() = default;
  VectorModeProfile(std::vector<Part> parts, std::array<Angular, 3> ang_e,
                    std::array<Angular, 3> ang_h, int phase_charge, std::string name);

  Vec3 e_radial(double rho) const;
  Vec3 h_radial(double rho) const;
  // Full field at (r in um, phi).
  Vec3 at(double r_um, double phi) const;

  const std::array<Angular, 3>& angular() const { return ang_e_; }
  const std::array<Angular, 3>& h_angular() const { return ang_h_; }
  int azimuthal_phase_charge() const { return phase_charge_; }
  const std::string& name() const { return name_; }
  const std::vector<Part>& parts() const { return parts_; }
  const DispersionPoint& point() const { return parts_.front().profile.point(); }
  double a_um() const { return parts_.front().profile.a_um(); }
  double rho_cut() const;
  double scale() const { return scale_; }

  double flux(const QuadratureSpec& quad = {}) const;
  VectorModeProfile scaled(double factor) const;

 private:
  std::vector<Part> parts_;
  std::array<Angular, 3> ang_e_{}, ang_h_{};
  int phase_charge_ = 0;
  std::string name_;
  double scale_ = 1.0;
};

VectorModeProfile normalized(const VectorModeProfile& p, const QuadratureSpec& quad = {});

// Even/odd hybrid mode (or TE/TM) as a vector profile.
VectorModeProfile hybrid_profile(DispersionCache& cache, const ModeLabel& label, double omega,
                                 const QuadratureSpec& quad = {});

VectorModeProfile oam_profile(DispersionCache& cache, const OamLabel& label, double omega,
                              const QuadratureSpec& quad = {}, bool allow_unstable = false);
VectorModeProfile oam_profile(const FiberSpec& fiber, const OamLabel& label, double omega,
                              const QuadratureSpec& quad = {}, bool allow_unstable = false);

// |Int d^2r sum_mu conj(a_mu) b_mu|, area in units of a^2.
double orthogonality_check(const VectorModeProfile& a, const VectorModeProfile& b,
                           const QuadratureSpec& quad = {});

}  // namespace oamfwm
