#include <oamfwm/grating.hpp>

#include <cmath>

namespace oamfwm {

void GratingSpec::validate() const {
  if (!(period_m > 0.0) || !std::isfinite(period_m)) {
    throw Error(ErrorCode::InvalidArgument, "grating", "period must be > 0");
  }
  if (!(delta_eps0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "grating", "delta_eps0 must be > 0");
  if (!(omega_t > 0.0)) throw Error(ErrorCode::InvalidArgument, "grating", "omega_t must be > 0");
  if (orientation != 1 && orientation != -1) {
    throw Error(ErrorCode::InvalidArgument, "grating", "orientation must be +1 or -1");
  }
  if (from.dir != to.dir) {
    throw Error(ErrorCode::DirectionMismatch, "grating", "resonance target modes travel in opposite directions");
  }
}

double GratingSpec::K() const { return orientation * 2.0 * kPi / period_m; }

bool coupling_allowed(int m, Sam sigma, int mp, Sam sigma_p, int m_g) {
  if (sigma == sigma_p) return mp == m + m_g;
  if (sigma == Sam::Plus) return mp == m + m_g + 2;
  return mp == m + m_g - 2;
}

cplx coupling_overlap(DispersionCache& cache, int m_g, const OamLabel& from, const OamLabel& to,
                      double omega, const QuadratureSpec& quad) {
  if (from.dir != to.dir) {
    throw Error(ErrorCode::DirectionMismatch, "grating", "modes travel in opposite directions");
  }
  from.validate();
  to.validate();
  if (!coupling_allowed(from.charge, from.sam, to.charge, to.sam, m_g)) return 0.0;
  const auto a = oam_profile(cache, from, omega, quad);
  const auto b = oam_profile(cache, to, omega, quad);
  std::array<cplx, 3> A{};
  bool any = false;
  for (int mu = 0; mu < 3; ++mu) {
    const Angular f[3] = {a.angular()[mu].conj(), b.angular()[mu], Angular::exp(-m_g)};
    A[mu] = angular_integral(f);
    any = any || A[mu] != cplx(0.0);
  }
  if (!any) return 0.0;
  auto f = [&](double rho) {
    const Vec3 ea = a.e_radial(rho), eb = b.e_radial(rho);
    cplx s = 0.0;
    for (int mu = 0; mu < 3; ++mu) s += std::conj(ea[mu]) * eb[mu] * A[mu];
    return s * rho;
  };
  // core only
  return integrate(f, 0.0, 1.0, quad);
}

cplx coupling_constant(DispersionCache& cache, const GratingSpec& g, const OamLabel& from,
                       const OamLabel& to, double omega, const QuadratureSpec& quad) {
  const cplx ov = coupling_overlap(cache, g.charge, from, to, omega, quad);
  if (ov == cplx(0.0)) return 0.0;
  const double n_from = cache.get(hybrid_partner(from), omega).n_eff;
  return g.delta_eps0 * omega / (4.0 * n_from * kSpeedOfLight) * ov;
}

double resonant_period(DispersionCache& cache, const OamLabel& from, const OamLabel& to,
                       double omega_t) {
  const double kf = cache.get(hybrid_partner(from), omega_t).k;
  const double kt = cache.get(hybrid_partner(to), omega_t).k;
  if (kf == kt) {
    throw Error(ErrorCode::DegenerateDispersion, "grating", "k_to equals k_from; no resonant period");
  }
  // The sign of the period carries no physics here; the magnitude is returned.
  return 2.0 * kPi / std::abs(kt - kf);
}

GratingSpec resonant_grating(DispersionCache& cache, const OamLabel& from, const OamLabel& to,
                             double omega_t, double delta_eps0, Photon target) {
  GratingSpec g;
  g.charge = to.phase_charge() - from.phase_charge();
  g.period_m = resonant_period(cache, from, to, omega_t);
  g.delta_eps0 = delta_eps0;
  g.target = target;
  g.from = from;
  g.to = to;
  g.omega_t = omega_t;
  const double kf = cache.get(hybrid_partner(from), omega_t).k;
  const double kt = cache.get(hybrid_partner(to), omega_t).k;
  g.orientation = kt >= kf ? 1 : -1;
  g.validate();
  return g;
}

CouplingPoint detunings(DispersionCache& cache, const GratingSpec& g, const OamLabel& from,
                        const OamLabel& to, double omega, const QuadratureSpec& quad) {
  g.validate();
  const DispersionPoint pf = cache.get(hybrid_partner(from), omega);
  const DispersionPoint pt = cache.get(hybrid_partner(to), omega);
  CouplingPoint c;
  c.kappa = coupling_constant(cache, g, from, to, omega, quad);
  c.delta = g.omega_t - omega;
  c.d = 0.5 * (c.delta * (1.0 / pt.v_g - 1.0 / pf.v_g) + g.K() + pf.k - pt.k);
  c.gamma = std::hypot(c.d, std::abs(c.kappa));
  c.v_from = pf.v_g;
  c.v_to = pt.v_g;
  c.k_from = pf.k;
  c.k_to = pt.k;
  return c;
}

}  // namespace oamfwm
