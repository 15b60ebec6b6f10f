#pragma once

#include <oamfwm/oam.hpp>

#include <array>
#include <string>
#include <vector>

namespace oamfwm {

// Isotropic chi(3): diagonal elements 1, the 18 pair elements 1/3.
struct Chi3Term {
  int i, j, k, l;
  double coeff;
};

struct Chi3Tensor {
  double chi0 = 1.0;

  double element(int i, int j, int k, int l) const;
  // The 21 nonzero elements (3 diagonal + 18 cross).
  static const std::vector<Chi3Term>& terms();
};

struct FwmChannel {
  OamLabel signal;
  OamLabel idler;
  double omega_s = 0.0;
  double omega_i = 0.0;
  double omega_p1 = 0.0;
  double omega_p2 = 0.0;
  ModeLabel pump1{Family::HE, 1, 1, Parity::Even};
  ModeLabel pump2{Family::HE, 1, 1, Parity::Even};
};

enum class AngularMomentumRule { AllowedConserving, AllowedSpinOrbit, Forbidden };
const char* to_string(AngularMomentumRule r);

AngularMomentumRule angular_momentum_allowed(const FwmChannel& channel);

// Int d^2r sum chi_ijkl A_i B_j conj(C_k) conj(D_l), area in units of a^2.
// Exactly zero, with no quadrature, when every angular factor vanishes.
cplx contract_overlap(const VectorModeProfile& A, const VectorModeProfile& B,
                      const VectorModeProfile& C, const VectorModeProfile& D,
                      const QuadratureSpec& quad = {}, const Chi3Tensor& chi = {});

cplx fwm_overlap(DispersionCache& cache, const FwmChannel& channel,
                 const QuadratureSpec& quad = {}, bool allow_unstable = false);

cplx hybrid_overlap(DispersionCache& cache, const FwmChannel& pumps_and_freqs,
                    const ModeLabel& signal, const ModeLabel& idler,
                    const QuadratureSpec& quad = {});

// One sign/SAM combination (signal sign, signal SAM; idler sign, idler SAM).
struct TableFamily {
  int signal_sign = +1;
  Sam signal_sam = Sam::Plus;
  int idler_sign = -1;
  Sam idler_sam = Sam::Minus;

  std::string name() const;
};

// Families whose cell pattern matches the printed Tables II..VIII
// (number 2..8); see README for the caption/data correspondence.
TableFamily table_family(int number);
// All eight combinations with a + SAM signal; the last one is identically zero.
std::vector<TableFamily> all_table_families();

struct TableFrequencies {
  double omega_p1, omega_p2, omega_s, omega_i;
};

struct OverlapTable {
  TableFamily family;
  int max_m = 0;
  std::vector<cplx> values;  // row m_i, column m_s, both 1-based

  cplx at(int m_i, int m_s) const { return values[(m_i - 1) * max_m + (m_s - 1)]; }
};

OverlapTable overlap_table(DispersionCache& cache, const TableFamily& family, int max_m,
                           const TableFrequencies& freqs, const QuadratureSpec& quad = {},
                           int workers = 1);

}  // namespace oamfwm
