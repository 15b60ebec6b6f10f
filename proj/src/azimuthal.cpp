#include <oamfwm/azimuthal.hpp>
#include <oamfwm/fiber.hpp>

#include <map>

namespace oamfwm {

cplx Angular::operator()(double phi) const {
  switch (kind) {
    case Kind::Cos: return std::cos(n * phi);
    case Kind::Sin: return std::sin(n * phi);
    case Kind::Exp: return std::polar(1.0, n * phi);
  }
  return 0.0;
}

cplx angular_integral(std::span<const Angular> factors) {
  // coefficients of exp(i k phi)
  std::map<int, cplx> poly{{0, 1.0}};
  for (const Angular& f : factors) {
    std::map<int, cplx> next;
    auto add = [&](int shift, cplx c) {
      for (const auto& [k, v] : poly) next[k + shift] += v * c;
    };
    switch (f.kind) {
      case Angular::Kind::Exp: add(f.n, 1.0); break;
      case Angular::Kind::Cos:
        add(f.n, 0.5);
        add(-f.n, 0.5);
        break;
      case Angular::Kind::Sin:
        add(f.n, cplx(0.0, -0.5));
        add(-f.n, cplx(0.0, 0.5));
        break;
    }
    poly.swap(next);
  }
  auto it = poly.find(0);
  if (it == poly.end() || it->second == cplx(0.0)) return 0.0;
  return 2.0 * kPi * it->second;
}

cplx angular_integral_sampled(std::span<const Angular> factors, int points) {
  if (points < 1) throw Error(ErrorCode::InvalidArgument, "overlap", "points must be >= 1");
  CompensatedSum<cplx> sum;
  const double h = 2.0 * kPi / points;
  for (int j = 0; j < points; ++j) {
    const double phi = j * h;
    cplx p = 1.0;
    for (const Angular& f : factors) p *= f(phi);
    sum.add(p);
  }
  return sum.value() * h;
}

}  // namespace oamfwm
