#include <oamfwm/overlap.hpp>
#include <oamfwm/parallel.hpp>

namespace oamfwm {

double Chi3Tensor::element(int i, int j, int k, int l) const {
  for (const auto& t : terms()) {
    if (t.i == i && t.j == j && t.k == k && t.l == l) return chi0 * t.coeff;
  }
  return 0.0;
}

const std::vector<Chi3Term>& Chi3Tensor::terms() {
  static const std::vector<Chi3Term> list = [] {
    std::vector<Chi3Term> v;
    for (int i = 0; i < 3; ++i) v.push_back({i, i, i, i, 1.0});
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        if (i == j) continue;
        v.push_back({i, i, j, j, 1.0 / 3.0});
        v.push_back({i, j, i, j, 1.0 / 3.0});
        v.push_back({i, j, j, i, 1.0 / 3.0});
      }
    }
    return v;
  }();
  return list;
}

const char* to_string(AngularMomentumRule r) {
  switch (r) {
    case AngularMomentumRule::AllowedConserving: return "allowed_conserving";
    case AngularMomentumRule::AllowedSpinOrbit: return "allowed_spin_orbit";
    case AngularMomentumRule::Forbidden: return "forbidden";
  }
  return "?";
}

AngularMomentumRule angular_momentum_allowed(const FwmChannel& channel) {
  const int total = channel.signal.phase_charge() + channel.idler.phase_charge();
  if (total == 0) return AngularMomentumRule::AllowedConserving;
  if (total == 2 || total == -2) return AngularMomentumRule::AllowedSpinOrbit;
  return AngularMomentumRule::Forbidden;
}

cplx contract_overlap(const VectorModeProfile& A, const VectorModeProfile& B,
                      const VectorModeProfile& C, const VectorModeProfile& D,
                      const QuadratureSpec& quad, const Chi3Tensor& chi) {
  struct Weighted {
    int i, j, k, l;
    cplx w;
  };
  std::vector<Weighted> active;
  for (const auto& t : Chi3Tensor::terms()) {
    const Angular f[4] = {A.angular()[t.i], B.angular()[t.j], C.angular()[t.k].conj(),
                          D.angular()[t.l].conj()};
    const cplx w = angular_integral(f);
    if (w != cplx(0.0)) active.push_back({t.i, t.j, t.k, t.l, w * t.coeff * chi.chi0});
  }
  if (active.empty()) return 0.0;
  const double cut = std::min({A.rho_cut(), B.rho_cut(), C.rho_cut(), D.rho_cut()});
  auto f = [&](double rho) {
    const Vec3 a = A.e_radial(rho), b = B.e_radial(rho);
    Vec3 c = C.e_radial(rho), d = D.e_radial(rho);
    for (auto& v : c) v = std::conj(v);
    for (auto& v : d) v = std::conj(v);
    cplx s = 0.0;
    for (const auto& t : active) s += t.w * a[t.i] * b[t.j] * c[t.k] * d[t.l];
    return s;
  };
  return integrate_radial(f, cut, quad);
}

cplx fwm_overlap(DispersionCache& cache, const FwmChannel& ch, const QuadratureSpec& quad,
                 bool allow_unstable) {
  ch.signal.validate(allow_unstable);
  ch.idler.validate(allow_unstable);
  if (angular_momentum_allowed(ch) == AngularMomentumRule::Forbidden) return 0.0;
  const auto p1 = hybrid_profile(cache, ch.pump1, ch.omega_p1, quad);
  const auto p2 = hybrid_profile(cache, ch.pump2, ch.omega_p2, quad);
  const auto s = oam_profile(cache, ch.signal, ch.omega_s, quad, allow_unstable);
  const auto i = oam_profile(cache, ch.idler, ch.omega_i, quad, allow_unstable);
  return contract_overlap(p1, p2, s, i, quad);
}

cplx hybrid_overlap(DispersionCache& cache, const FwmChannel& f, const ModeLabel& signal,
                    const ModeLabel& idler, const QuadratureSpec& quad) {
  if (signal.family != Family::HE || idler.family != Family::HE) {
    throw Error(ErrorCode::InvalidArgument, "overlap", "hybrid_overlap expects HE signal and idler");
  }
  const auto p1 = hybrid_profile(cache, f.pump1, f.omega_p1, quad);
  const auto p2 = hybrid_profile(cache, f.pump2, f.omega_p2, quad);
  const auto s = hybrid_profile(cache, signal, f.omega_s, quad);
  const auto i = hybrid_profile(cache, idler, f.omega_i, quad);
  return contract_overlap(p1, p2, s, i, quad);
}

std::string TableFamily::name() const {
  auto one = [](const char* m, int sign, Sam sam) {
    return std::string("O") + (sign > 0 ? "+" : "-") + m + "^" + to_string(sam);
  };
  return one("ms", signal_sign, signal_sam) + " " + one("mi", idler_sign, idler_sam);
}

TableFamily table_family(int number) {
  switch (number) {
    case 2: return {+1, Sam::Plus, -1, Sam::Minus};
    case 3: return {-1, Sam::Plus, +1, Sam::Plus};
    case 4: return {+1, Sam::Plus, +1, Sam::Minus};
    case 5: return {-1, Sam::Plus, +1, Sam::Minus};
    case 6: return {+1, Sam::Plus, -1, Sam::Plus};
    case 7: return {-1, Sam::Plus, -1, Sam::Minus};
    case 8: return {-1, Sam::Plus, -1, Sam::Plus};
  }
  throw Error(ErrorCode::InvalidArgument, "overlap", "table number must be 2..8");
}

std::vector<TableFamily> all_table_families() {
  std::vector<TableFamily> v;
  for (int t = 2; t <= 8; ++t) v.push_back(table_family(t));
  v.push_back({+1, Sam::Plus, +1, Sam::Plus});
  return v;
}

OverlapTable overlap_table(DispersionCache& cache, const TableFamily& fam, int max_m,
                           const TableFrequencies& fr, const QuadratureSpec& quad, int workers) {
  if (max_m < 1) throw Error(ErrorCode::InvalidArgument, "overlap", "max_m must be >= 1");
  OverlapTable out{fam, max_m, std::vector<cplx>(static_cast<std::size_t>(max_m * max_m))};
  auto signal = [&](int m) { return OamLabel{fam.signal_sign * m, fam.signal_sam}; };
  auto idler = [&](int m) {
    return OamLabel{fam.idler_sign * m, fam.idler_sam, 1, Direction::Backward};
  };
  // Profiles are built once per mode; cells only contract them.
  const auto p1 = hybrid_profile(cache, {Family::HE, 1, 1, Parity::Even}, fr.omega_p1, quad);
  const auto p2 = hybrid_profile(cache, {Family::HE, 1, 1, Parity::Even}, fr.omega_p2, quad);
  std::vector<VectorModeProfile> sp(max_m), ip(max_m);
  parallel_for(static_cast<std::size_t>(2 * max_m), workers, [&](std::size_t k) {
    const int m = static_cast<int>(k % max_m) + 1;
    if (k < static_cast<std::size_t>(max_m)) {
      sp[m - 1] = oam_profile(cache, signal(m), fr.omega_s, quad, true);
    } else {
      ip[m - 1] = oam_profile(cache, idler(m), fr.omega_i, quad, true);
    }
  });
  parallel_for(out.values.size(), workers, [&](std::size_t k) {
    const int mi = static_cast<int>(k) / max_m + 1;
    const int ms = static_cast<int>(k) % max_m + 1;
    FwmChannel ch{signal(ms), idler(mi), fr.omega_s, fr.omega_i, fr.omega_p1, fr.omega_p2};
    if (angular_momentum_allowed(ch) == AngularMomentumRule::Forbidden) return;
    out.values[k] = contract_overlap(p1, p2, sp[ms - 1], ip[mi - 1], quad);
  });
  return out;
}

}  // namespace oamfwm
