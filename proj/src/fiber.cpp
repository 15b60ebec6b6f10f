#include <oamfwm/fiber.hpp>

#include <cmath>
#include <limits>
#include <mutex>

namespace oamfwm {

double omega_from_wavelength_um(double lambda_um) {
  if (!(lambda_um > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "fiber_modes", "wavelength must be > 0");
  }
  return 2.0 * kPi * kSpeedOfLight / (lambda_um * 1e-6);
}

double wavelength_um_from_omega(double omega) {
  return 2.0 * kPi * kSpeedOfLight / omega * 1e6;
}

void FiberSpec::validate() const {
  if (!(n_cl > 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "fiber_modes", "cladding_index must be > 1");
  }
  if (!(n_co > n_cl)) {
    throw Error(ErrorCode::InvalidArgument, "fiber_modes", "core_index must exceed cladding_index");
  }
  if (!(a_um > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "fiber_modes", "core_radius must be > 0");
  }
}

const char* to_string(Family f) {
  switch (f) {
    case Family::HE: return "HE";
    case Family::EH: return "EH";
    case Family::TE: return "TE";
    case Family::TM: return "TM";
  }
  return "?";
}

void ModeLabel::validate() const {
  if (m < 0) throw Error(ErrorCode::InvalidArgument, "fiber_modes", "azimuthal order must be >= 0");
  if (n != 1) throw Error(ErrorCode::InvalidArgument, "fiber_modes", "radial order is fixed to 1");
  if ((family == Family::TE || family == Family::TM) && m != 0) {
    throw Error(ErrorCode::InvalidArgument, "fiber_modes", "TE/TM require m = 0");
  }
  if ((family == Family::HE || family == Family::EH) && m == 0) {
    throw Error(ErrorCode::InvalidArgument, "fiber_modes", "HE/EH require m >= 1");
  }
}

double v_parameter(const FiberSpec& fiber, double wavelength_um) {
  if (!(wavelength_um > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "fiber_modes", "wavelength must be > 0");
  }
  const double d = fiber.eps_co() - fiber.eps_cl();
  return 2.0 * kPi * fiber.a_um * std::sqrt(std::max(d, 0.0)) / wavelength_um;
}

namespace {

// Sign of the square-root branch: +1 selects EH (TE at m = 0), -1 selects HE (TM).
int branch_sign(Family f) { return (f == Family::EH || f == Family::TE) ? +1 : -1; }

int order_of(const ModeLabel& label) {
  return (label.family == Family::TE || label.family == Family::TM) ? 0 : label.m;
}

double v_of(const FiberSpec& fiber, double omega) {
  return v_parameter(fiber, wavelength_um_from_omega(omega));
}

struct CharTerms {
  double x, P, R;
};

CharTerms char_terms(double r2, int m, double U, double W) {
  const double km = bessel_k(m, W);
  const double kp = -0.5 * (bessel_k(m - 1, W) + bessel_k(m + 1, W));
  const double jm = bessel_j(m, U);
  const double jp = 0.5 * (bessel_j(m - 1, U) - bessel_j(m + 1, U));
  const double P = kp / (W * km);
  const double a = 0.5 * (1.0 - r2) * P;
  const double R = std::sqrt(a * a + double(m) * m * (1.0 / (U * U) + 1.0 / (W * W)) *
                                         (1.0 / (U * U) + r2 / (W * W)));
  return {jp / (U * jm), P, R};
}

double okamoto_residual(double r2, int m, double U, double W) {
  const auto t = char_terms(r2, m, U, W);
  const double rhs = double(m) * m * (1.0 / (U * U) + 1.0 / (W * W)) * (1.0 / (U * U) + r2 / (W * W));
  const double lhs = (t.x + t.P) * (t.x + r2 * t.P);
  const double scale = std::abs(rhs) + std::abs(t.x + t.P) * std::abs(t.x + r2 * t.P) +
                       std::abs(t.x * t.P);
  return std::abs(lhs - rhs) / scale;
}

double scan_lower_bound(Family family, int m, double V) {
  // Guards against the spurious EH root that appears as U -> 0 for large m;
  // every genuine EH_m root lies above the first zero of J_m, which exceeds m.
  if (family == Family::EH && m >= 1) return std::max(1e-3 * V, 0.9 * m);
  return 1e-3 * V;
}

double scan_upper_bound(double V) { return V * std::sqrt(1.0 - 1e-10); }

// Refine a root inside [lo, hi] after snapping to a canonical grid cell, so
// that the result does not depend on how the bracket was found.
double refine_canonical(const std::function<double(double)>& F, double lo, double hi, double V) {
  const double cell = 1e-7 * V;
  const double x0 = find_root(F, {lo, hi, 1e-15});
  double clo = std::floor(x0 / cell) * cell;
  double chi = clo + cell;
  clo = std::max(clo, lo);
  chi = std::min(chi, hi);
  const double flo = F(clo), fhi = F(chi);
  if (std::isfinite(flo) && std::isfinite(fhi) && std::signbit(flo) != std::signbit(fhi)) {
    return find_root(F, {clo, chi, 1e-15});
  }
  return x0;
}

std::vector<double> scan_roots(const FiberSpec& fiber, Family family, int m, double V,
                               std::size_t max_roots) {
  const double lo = scan_lower_bound(family, m, V);
  const double hi = scan_upper_bound(V);
  std::vector<double> roots;
  if (!(hi > lo)) return roots;
  auto F = [&](double U) { return characteristic(fiber, family, m, V, U); };
  const double step = 0.01;
  const int n = std::max(200, static_cast<int>(std::ceil((hi - lo) / step)));
  double u_prev = lo;
  double f_prev = F(u_prev);
  for (int i = 1; i <= n && roots.size() < max_roots; ++i) {
    const double u = lo + (hi - lo) * double(i) / n;
    const double f = F(u);
    if (std::isfinite(f) && std::isfinite(f_prev) && f != 0.0 &&
        std::signbit(f) != std::signbit(f_prev)) {
      const double root = refine_canonical(F, u_prev, u, V);
      if (!roots.empty() && std::abs(root - roots.back()) < 1e-9 * V) {
        throw Error(ErrorCode::BranchAmbiguity, "fiber_modes",
                    "two roots of the same branch within tolerance at U=" +
                        std::to_string(roots.back()) + " and U=" + std::to_string(root));
      }
      roots.push_back(root);
    }
    u_prev = u;
    f_prev = f;
  }
  return roots;
}

DispersionPoint make_point(const FiberSpec& fiber, Family family, int m, double omega, double U) {
  const double V = v_of(fiber, omega);
  const double r2 = fiber.eps_cl() / fiber.eps_co();
  DispersionPoint p;
  p.family = family;
  p.m = m;
  p.omega = omega;
  p.V = V;
  p.U = U;
  p.W = std::sqrt(V * V - U * U);
  const double a = fiber.a_um * 1e-6;
  const double k0 = omega / kSpeedOfLight;
  const double b = (U / V) * (U / V);
  p.n_eff = std::sqrt(fiber.eps_co() - b * (fiber.eps_co() - fiber.eps_cl()));
  p.k = p.n_eff * k0;
  p.u = U / a;
  p.w = p.W / a;
  const auto t = char_terms(r2, m, U, p.W);
  if (family == Family::TE) {
    p.s = std::numeric_limits<double>::infinity();
  } else if (family == Family::TM) {
    p.s = 0.0;
  } else {
    p.s = m * (1.0 / (U * U) + 1.0 / (p.W * p.W)) / (t.x + t.P);
  }
  p.residual = okamoto_residual(r2, m, U, p.W);
  if (m == 0) {
    const double target = (family == Family::TE) ? t.x + t.P : t.x + r2 * t.P;
    p.residual = std::abs(target) / (std::abs(t.x) + std::abs(t.P));
  }
  return p;
}

double solve_k(const FiberSpec& fiber, const ModeLabel& label, double omega, double U_hint,
               double* U_out);

DispersionPoint finish(const FiberSpec& fiber, const ModeLabel& label, double omega, double U) {
  DispersionPoint p = make_point(fiber, label.family, order_of(label), omega, U);
  const double h = 1e-6 * omega;
  const double kp = solve_k(fiber, label, omega + h, U, nullptr);
  const double km = solve_k(fiber, label, omega - h, U, nullptr);
  p.v_g = 2.0 * h / (kp - km);
  return p;
}

double root_near(const FiberSpec& fiber, const ModeLabel& label, double omega, double U_hint) {
  const int m = order_of(label);
  const double V = v_of(fiber, omega);
  auto F = [&](double U) { return characteristic(fiber, label.family, m, V, U); };
  const double lo_bound = scan_lower_bound(label.family, m, V);
  const double hi_bound = scan_upper_bound(V);
  for (double eps = 1e-7; eps < 2e-2; eps *= 4.0) {
    const double lo = std::max(lo_bound, U_hint - eps * V);
    const double hi = std::min(hi_bound, U_hint + eps * V);
    if (!(hi > lo)) break;
    const double flo = F(lo), fhi = F(hi);
    if (std::isfinite(flo) && std::isfinite(fhi) && std::signbit(flo) != std::signbit(fhi)) {
      return refine_canonical(F, lo, hi, V);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double solve_k(const FiberSpec& fiber, const ModeLabel& label, double omega, double U_hint,
               double* U_out) {
  double U = root_near(fiber, label, omega, U_hint);
  if (!std::isfinite(U)) {
    auto roots = branch_roots(fiber, label.family, order_of(label), omega);
    if (roots.empty()) {
      throw Error(ErrorCode::NotGuided, "fiber_modes", "mode not guided at this frequency");
    }
    U = roots.front();
  }
  if (U_out) *U_out = U;
  return make_point(fiber, label.family, order_of(label), omega, U).k;
}

}  // namespace

double characteristic(const FiberSpec& fiber, Family family, int m, double V, double U) {
  const double W2 = V * V - U * U;
  if (!(U > 0.0) || !(W2 > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  const double W = std::sqrt(W2);
  const double r2 = fiber.eps_cl() / fiber.eps_co();
  const double km = bessel_k(m, W);
  const double kp = -0.5 * (bessel_k(m - 1, W) + bessel_k(m + 1, W));
  if (!std::isfinite(km) || !std::isfinite(kp) || km == 0.0) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  const double P = kp / (W * km);
  const double a = 0.5 * (1.0 - r2) * P;
  const double R = std::sqrt(a * a + double(m) * m * (1.0 / (U * U) + 1.0 / (W * W)) *
                                         (1.0 / (U * U) + r2 / (W * W)));
  const double X = -0.5 * (1.0 + r2) * P + branch_sign(family) * R;
  const double jm = bessel_j(m, U);
  const double jp = 0.5 * (bessel_j(m - 1, U) - bessel_j(m + 1, U));
  return jp - U * jm * X;
}

std::vector<double> branch_roots(const FiberSpec& fiber, Family family, int m, double omega) {
  fiber.validate();
  return scan_roots(fiber, family, m, v_of(fiber, omega), 1000);
}

DispersionPoint solve_mode(const FiberSpec& fiber, const ModeLabel& label, double omega) {
  fiber.validate();
  label.validate();
  if (!(omega > 0.0)) throw Error(ErrorCode::InvalidArgument, "fiber_modes", "omega must be > 0");
  const double V = v_of(fiber, omega);
  auto roots = scan_roots(fiber, label.family, order_of(label), V, 2);
  if (roots.empty()) {
    throw Error(ErrorCode::NotGuided, "fiber_modes",
                std::string(to_string(label.family)) + std::to_string(label.m) +
                    " is not guided at V=" + std::to_string(V));
  }
  return finish(fiber, label, omega, roots.front());
}

DispersionPoint solve_mode_near(const FiberSpec& fiber, const ModeLabel& label, double omega,
                                double U_hint) {
  fiber.validate();
  label.validate();
  const double U = root_near(fiber, label, omega, U_hint);
  if (!std::isfinite(U)) return solve_mode(fiber, label, omega);
  return finish(fiber, label, omega, U);
}

DispersionPoint DispersionCache::get(const ModeLabel& label, double omega) {
  label.validate();
  const Key key{static_cast<int>(label.family), label.m, omega};
  {
    std::shared_lock lock(mutex_);
    auto it = table_.find(key);
    if (it != table_.end()) return it->second;
  }
  double hint = std::numeric_limits<double>::quiet_NaN();
  {
    std::shared_lock lock(mutex_);
    auto it = anchors_.find({static_cast<int>(label.family), label.m});
    if (it != anchors_.end()) {
      double best = 1e-3;
      for (const auto& [w, U] : it->second) {
        const double rel = std::abs(w - omega) / omega;
        if (rel < best) {
          best = rel;
          hint = U;
        }
      }
    }
  }
  DispersionPoint p = std::isfinite(hint) ? solve_mode_near(fiber_, label, omega, hint)
                                          : solve_mode(fiber_, label, omega);
  std::unique_lock lock(mutex_);
  table_.emplace(key, p);
  auto& list = anchors_[{static_cast<int>(label.family), label.m}];
  if (list.size() < 64) list.emplace_back(omega, p.U);
  return p;
}

std::size_t DispersionCache::size() const {
  std::shared_lock lock(mutex_);
  return table_.size();
}

// ---------------------------------------------------------------------------

RadialProfile::RadialProfile(const FiberSpec& fiber, const DispersionPoint& point)
    : point_(point), a_um_(fiber.a_um), n_co_(fiber.n_co), n_cl_(fiber.n_cl) {
  const int m = point.m;
  jm_a_ = bessel_j(m, point.U);
  km_a_ = bessel_k(m, point.W);
  k0_a_ = point.omega / kSpeedOfLight * fiber.a_um * 1e-6;
  beta_a_ = point.n_eff * k0_a_;
  // Cut where the slowest-decaying cladding Bessel factor has dropped by 1e-16.
  const double W = point.W;
  const int order = m + 1;
  const double ref = std::log(bessel_k(order, W));
  auto g = [&](double rho) { return std::log(bessel_k(order, W * rho)) - ref + 16.0 * std::log(10.0); };
  double hi = 2.0;
  while (g(hi) > 0.0 && hi < 1e4) hi *= 2.0;
  rho_cut_ = find_root(g, {1.0, hi, 1e-10});
}

namespace {

struct Coeffs {
  double cA, cB;    // multiply J_{m-1}, J_{m+1} in e_r / e_phi
  double c1A, c1B;  // core H
  double c0A, c0B;  // cladding H
  double hz;        // factor in h_z
};

Coeffs coeffs(const DispersionPoint& p, double n_co, double n_cl, double beta_a, double k0_a) {
  const double bk = (beta_a / k0_a) * (beta_a / k0_a);
  if (p.family == Family::TE) {
    // Limit s -> infinity of the hybrid expressions, divided through by s.
    return {-0.5, 0.5, -0.5 * bk / (n_co * n_co), 0.5 * bk / (n_co * n_co),
            -0.5 * bk / (n_cl * n_cl), 0.5 * bk / (n_cl * n_cl), 1.0};
  }
  const double s = p.s;
  const double s1 = bk * s / (n_co * n_co);
  const double s0 = bk * s / (n_cl * n_cl);
  return {0.5 * (1.0 - s), 0.5 * (1.0 + s), 0.5 * (1.0 - s1), 0.5 * (1.0 + s1),
          0.5 * (1.0 - s0), 0.5 * (1.0 + s0), s};
}

}  // namespace

Vec3 RadialProfile::e_rho(double rho) const {
  const int m = point_.m;
  const auto c = coeffs(point_, n_co_, n_cl_, beta_a_, k0_a_);
  const cplx I(0.0, 1.0);
  const bool te = point_.family == Family::TE;
  if (rho <= 1.0) {
    const double x = point_.U * rho;
    const double jm1 = bessel_j(m - 1, x), jp1 = bessel_j(m + 1, x);
    const double f = beta_a_ / point_.U / jm_a_;
    return {-I * f * (c.cA * jm1 - c.cB * jp1) * scale_, I * f * (c.cA * jm1 + c.cB * jp1) * scale_,
            te ? cplx(0.0) : cplx(bessel_j(m, x) / jm_a_ * scale_)};
  }
  const double x = point_.W * rho;
  const double km1 = bessel_k(m - 1, x), kp1 = bessel_k(m + 1, x);
  const double f = beta_a_ / point_.W / km_a_;
  return {-I * f * (c.cA * km1 + c.cB * kp1) * scale_, I * f * (c.cA * km1 - c.cB * kp1) * scale_,
          te ? cplx(0.0) : cplx(bessel_k(m, x) / km_a_ * scale_)};
}

Vec3 RadialProfile::h_rho(double rho) const {
  const int m = point_.m;
  const auto c = coeffs(point_, n_co_, n_cl_, beta_a_, k0_a_);
  const cplx I(0.0, 1.0);
  const double bz = -(beta_a_ / k0_a_) * c.hz;
  if (rho <= 1.0) {
    const double x = point_.U * rho;
    const double jm1 = bessel_j(m - 1, x), jp1 = bessel_j(m + 1, x);
    const double f = k0_a_ * n_co_ * n_co_ / point_.U / jm_a_;
    return {-I * f * (c.c1A * jm1 + c.c1B * jp1) * scale_,
            -I * f * (c.c1A * jm1 - c.c1B * jp1) * scale_,
            cplx(bz * bessel_j(m, x) / jm_a_ * scale_)};
  }
  const double x = point_.W * rho;
  const double km1 = bessel_k(m - 1, x), kp1 = bessel_k(m + 1, x);
  const double f = k0_a_ * n_cl_ * n_cl_ / point_.W / km_a_;
  return {-I * f * (c.c0A * km1 - c.c0B * kp1) * scale_,
          -I * f * (c.c0A * km1 + c.c0B * kp1) * scale_,
          cplx(bz * bessel_k(m, x) / km_a_ * scale_)};
}

double RadialProfile::flux_density(double rho) const {
  const Vec3 e = e_rho(rho);
  const Vec3 h = h_rho(rho);
  return (e[0] * std::conj(h[1]) - e[1] * std::conj(h[0])).real() / point_.n_eff;
}

double RadialProfile::flux(const QuadratureSpec& quad) const {
  const double angular = point_.m == 0 ? 2.0 * kPi : kPi;
  return angular * integrate_radial([this](double rho) { return flux_density(rho); }, rho_cut_, quad);
}

RadialProfile RadialProfile::scaled(double factor) const {
  RadialProfile out = *this;
  out.scale_ *= factor;
  return out;
}

RadialProfile radial_profile(const FiberSpec& fiber, const DispersionPoint& point,
                             const ModeLabel& label) {
  label.validate();
  if (label.family != point.family ||
      point.m != ((label.family == Family::TE || label.family == Family::TM) ? 0 : label.m)) {
    throw Error(ErrorCode::InconsistentInput, "fiber_modes", "dispersion point and label disagree");
  }
  return RadialProfile(fiber, point);
}

RadialProfile poynting_normalize(const RadialProfile& profile, const DispersionPoint& point,
                                 const QuadratureSpec& quad) {
  if (point.family != profile.point().family || point.m != profile.point().m ||
      point.omega != profile.point().omega) {
    throw Error(ErrorCode::InconsistentInput, "fiber_modes", "profile and dispersion point disagree");
  }
  const double P = profile.flux(quad);
  if (!(P > 0.0) || !std::isfinite(P)) {
    throw Error(ErrorCode::DegenerateFlux, "fiber_modes", "longitudinal flux is not positive");
  }
  return profile.scaled(1.0 / std::sqrt(P));
}

}  // namespace oamfwm
