#include <oamfwm/oam.hpp>

#include <cmath>

namespace oamfwm {

const char* to_string(Sam s) { return s == Sam::Plus ? "+" : "-"; }

void OamLabel::validate(bool allow_unstable) const {
  if (n != 1) throw Error(ErrorCode::InvalidArgument, "oam_basis", "radial order is fixed to 1");
  if (!co_rotating() && std::abs(charge) == 1 && !allow_unstable) {
    throw Error(ErrorCode::UnstableMode, "oam_basis",
                name() + " would be formed by the unstable TE and TM modes");
  }
}

bool OamLabel::co_rotating() const {
  return charge == 0 || (charge > 0) == (sam == Sam::Plus);
}

int OamLabel::handedness() const {
  if (charge != 0) return charge > 0 ? +1 : -1;
  return sign_of(sam);
}

std::string OamLabel::name() const {
  std::string s = "O";
  s += charge >= 0 ? "+" : "-";
  s += std::to_string(std::abs(charge));
  s += "^";
  s += to_string(sam);
  return s;
}

ModeLabel hybrid_partner(const OamLabel& label) {
  label.validate(false);
  const int c = std::abs(label.charge);
  if (label.co_rotating()) return {Family::HE, c + 1, 1, Parity::Even};
  return {Family::EH, c - 1, 1, Parity::Even};
}

VectorModeProfile::VectorModeProfile(std::vector<Part> parts, std::array<Angular, 3> ang_e,
                                     std::array<Angular, 3> ang_h, int phase_charge,
                                     std::string name)
    : parts_(std::move(parts)),
      ang_e_(ang_e),
      ang_h_(ang_h),
      phase_charge_(phase_charge),
      name_(std::move(name)) {
  if (parts_.empty()) throw Error(ErrorCode::InvalidArgument, "oam_basis", "profile without parts");
}

Vec3 VectorModeProfile::e_radial(double rho) const {
  Vec3 out{};
  for (const Part& p : parts_) {
    const Vec3 e = p.profile.e_rho(rho);
    for (int mu = 0; mu < 3; ++mu) {
      if (p.ce[mu] != cplx(0.0)) out[mu] += p.ce[mu] * e[mu];
    }
  }
  for (auto& v : out) v *= scale_;
  return out;
}

Vec3 VectorModeProfile::h_radial(double rho) const {
  Vec3 out{};
  for (const Part& p : parts_) {
    const Vec3 h = p.profile.h_rho(rho);
    for (int mu = 0; mu < 3; ++mu) {
      if (p.ch[mu] != cplx(0.0)) out[mu] += p.ch[mu] * h[mu];
    }
  }
  for (auto& v : out) v *= scale_;
  return out;
}

Vec3 VectorModeProfile::at(double r_um, double phi) const {
  Vec3 e = e_radial(r_um / a_um());
  for (int mu = 0; mu < 3; ++mu) e[mu] *= ang_e_[mu](phi);
  return e;
}

double VectorModeProfile::rho_cut() const {
  double c = 0.0;
  for (const Part& p : parts_) c = std::max(c, p.profile.rho_cut());
  return c;
}

double VectorModeProfile::flux(const QuadratureSpec& quad) const {
  const Angular rphi[2] = {ang_e_[0], ang_h_[1].conj()};
  const Angular phir[2] = {ang_e_[1], ang_h_[0].conj()};
  const cplx A1 = angular_integral(rphi);
  const cplx A2 = angular_integral(phir);
  auto f = [&](double rho) {
    const Vec3 e = e_radial(rho);
    const Vec3 h = h_radial(rho);
    return (e[0] * std::conj(h[1]) * A1 - e[1] * std::conj(h[0]) * A2).real();
  };
  return integrate_radial(f, rho_cut(), quad);
}

VectorModeProfile VectorModeProfile::scaled(double factor) const {
  VectorModeProfile out = *this;
  out.scale_ *= factor;
  return out;
}

VectorModeProfile normalized(const VectorModeProfile& p, const QuadratureSpec& quad) {
  const double P = p.flux(quad);
  if (!(P > 0.0) || !std::isfinite(P)) {
    throw Error(ErrorCode::DegenerateFlux, "oam_basis", "non-positive flux for " + p.name());
  }
  return p.scaled(1.0 / std::sqrt(P));
}

namespace {

RadialProfile normalized_radial(DispersionCache& cache, const ModeLabel& label, double omega,
                                const QuadratureSpec& quad) {
  const DispersionPoint pt = cache.get(label, omega);
  return poynting_normalize(radial_profile(cache.fiber(), pt, label), pt, quad);
}

std::string hybrid_name(const ModeLabel& l) {
  std::string s = to_string(l.family);
  if (l.family == Family::HE || l.family == Family::EH) s += std::to_string(l.m);
  s += l.parity == Parity::Even ? "(e)" : "(o)";
  return s;
}

}  // namespace

VectorModeProfile hybrid_profile(DispersionCache& cache, const ModeLabel& label, double omega,
                                 const QuadratureSpec& quad) {
  label.validate();
  RadialProfile rp = normalized_radial(cache, label, omega, quad);
  const double inv_n = 1.0 / rp.point().n_eff;
  const int m = label.m;
  std::vector<VectorModeProfile::Part> parts;
  std::array<Angular, 3> ae, ah;
  if (m == 0) {
    parts.push_back({rp, {1.0, 1.0, 1.0}, {inv_n, inv_n, inv_n}});
    ae = ah = {Angular::exp(0), Angular::exp(0), Angular::exp(0)};
  } else if (label.parity == Parity::Even) {
    parts.push_back({rp, {1.0, 1.0, 1.0}, {inv_n, inv_n, inv_n}});
    ae = {Angular::cos(m), Angular::sin(m), Angular::cos(m)};
    ah = {Angular::sin(m), Angular::cos(m), Angular::sin(m)};
  } else {
    parts.push_back({rp, {1.0, -1.0, 1.0}, {-inv_n, inv_n, -inv_n}});
    ae = {Angular::sin(m), Angular::cos(m), Angular::sin(m)};
    ah = {Angular::cos(m), Angular::sin(m), Angular::cos(m)};
  }
  return normalized(VectorModeProfile(std::move(parts), ae, ah, 0, hybrid_name(label)), quad);
}

VectorModeProfile oam_profile(DispersionCache& cache, const OamLabel& label, double omega,
                              const QuadratureSpec& quad, bool allow_unstable) {
  label.validate(allow_unstable);
  const cplx ms(0.0, -label.handedness());  // -i * sgn
  const double r = 1.0 / std::sqrt(2.0);
  std::vector<VectorModeProfile::Part> parts;
  int ell = label.phase_charge();
  if (!label.co_rotating() && std::abs(label.charge) == 1) {
    RadialProfile tm = normalized_radial(cache, {Family::TM, 0, 1, Parity::Even}, omega, quad);
    RadialProfile te = normalized_radial(cache, {Family::TE, 0, 1, Parity::Even}, omega, quad);
    const double ntm = 1.0 / tm.point().n_eff, nte = 1.0 / te.point().n_eff;
    parts.push_back({tm, {r, 0.0, r}, {ms * r * ntm, r * ntm, ms * r * ntm}});
    parts.push_back({te, {0.0, ms * r, 0.0}, {ms * r * nte, r * nte, ms * r * nte}});
    ell = 0;
  } else {
    const ModeLabel partner = hybrid_partner(label);
    RadialProfile rp = normalized_radial(cache, partner, omega, quad);
    const double inv_n = 1.0 / rp.point().n_eff;
    parts.push_back({rp, {r, ms * r, r}, {ms * r * inv_n, r * inv_n, ms * r * inv_n}});
  }
  const Angular a = Angular::exp(ell);
  return normalized(VectorModeProfile(std::move(parts), {a, a, a}, {a, a, a}, ell, label.name()),
                    quad);
}

VectorModeProfile oam_profile(const FiberSpec& fiber, const OamLabel& label, double omega,
                              const QuadratureSpec& quad, bool allow_unstable) {
  DispersionCache cache(fiber);
  return oam_profile(cache, label, omega, quad, allow_unstable);
}

double orthogonality_check(const VectorModeProfile& a, const VectorModeProfile& b,
                           const QuadratureSpec& quad) {
  std::array<cplx, 3> A{};
  bool any = false;
  for (int mu = 0; mu < 3; ++mu) {
    const Angular f[2] = {a.angular()[mu].conj(), b.angular()[mu]};
    A[mu] = angular_integral(f);
    any = any || A[mu] != cplx(0.0);
  }
  if (!any) return 0.0;
  auto f = [&](double rho) {
    const Vec3 ea = a.e_radial(rho);
    const Vec3 eb = b.e_radial(rho);
    cplx s = 0.0;
    for (int mu = 0; mu < 3; ++mu) s += std::conj(ea[mu]) * eb[mu] * A[mu];
    return s;
  };
  return std::abs(integrate_radial(f, std::max(a.rho_cut(), b.rho_cut()), quad));
}

}  // namespace oamfwm
