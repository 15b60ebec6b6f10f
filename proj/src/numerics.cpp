#include <oamfwm/numerics.hpp>

#include <boost/math/policies/policy.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/bessel_prime.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <cstdint>
#include <limits>

namespace oamfwm {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoSignChange: return "NoSignChange";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::MaxSubdivisionsExceeded: return "MaxSubdivisionsExceeded";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::NotGuided: return "NotGuided";
    case ErrorCode::BranchAmbiguity: return "BranchAmbiguity";
    case ErrorCode::InconsistentInput: return "InconsistentInput";
    case ErrorCode::DegenerateFlux: return "DegenerateFlux";
    case ErrorCode::UnstableMode: return "UnstableMode";
    case ErrorCode::ForbiddenChannel: return "ForbiddenChannel";
    case ErrorCode::DirectionMismatch: return "DirectionMismatch";
    case ErrorCode::DegenerateDispersion: return "DegenerateDispersion";
    case ErrorCode::GridTooNarrow: return "GridTooNarrow";
    case ErrorCode::NoRootInWindow: return "NoRootInWindow";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
  }
  return "Unknown";
}

void QuadratureSpec::validate() const {
  if (!(relative_tolerance > 0.0) || !(absolute_tolerance > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "numerics", "quadrature tolerances must be > 0");
  }
  if (max_subdivisions < 1) {
    throw Error(ErrorCode::InvalidArgument, "numerics", "max_subdivisions must be >= 1");
  }
}

void RootSpec::validate() const {
  if (!(bracket_lo < bracket_hi)) {
    throw Error(ErrorCode::InvalidArgument, "numerics", "bracket_lo must be < bracket_hi");
  }
  if (!(tolerance > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "numerics", "root tolerance must be > 0");
  }
}

double find_root(const std::function<double(double)>& f, const RootSpec& spec) {
  spec.validate();
  auto checked = [&](double x) {
    const double v = f(x);
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::NonFinite, "numerics", "root function returned a non-finite value");
    }
    return v;
  };
  const double flo = checked(spec.bracket_lo);
  const double fhi = checked(spec.bracket_hi);
  if (flo == 0.0) return spec.bracket_lo;
  if (fhi == 0.0) return spec.bracket_hi;
  if (std::signbit(flo) == std::signbit(fhi)) {
    throw Error(ErrorCode::NoSignChange, "numerics", "bracket endpoints have the same sign");
  }
  const double tol = spec.tolerance;
  auto stop = [tol](double a, double b) {
    return std::abs(b - a) <= tol * std::max(1.0, std::min(std::abs(a), std::abs(b)));
  };
  std::uintmax_t iters = 200;
  auto r = boost::math::tools::toms748_solve(checked, spec.bracket_lo, spec.bracket_hi, flo, fhi,
                                             stop, iters);
  const double fa = checked(r.first);
  const double fb = checked(r.second);
  double x = std::abs(fa) <= std::abs(fb) ? r.first : r.second;
  return std::clamp(x, spec.bracket_lo, spec.bracket_hi);
}

namespace {

using ErrnoPolicy = boost::math::policies::policy<
    boost::math::policies::overflow_error<boost::math::policies::errno_on_error>,
    boost::math::policies::underflow_error<boost::math::policies::errno_on_error>,
    boost::math::policies::domain_error<boost::math::policies::errno_on_error>,
    boost::math::policies::evaluation_error<boost::math::policies::errno_on_error>,
    boost::math::policies::promote_double<false>>;

}  // namespace

double bessel_j(int order, double x) {
  if (order < 0) {
    const double v = boost::math::cyl_bessel_j(-order, x, ErrnoPolicy());
    return (order % 2 == 0) ? v : -v;
  }
  return boost::math::cyl_bessel_j(order, x, ErrnoPolicy());
}

double bessel_k(int order, double x) {
  return boost::math::cyl_bessel_k(order < 0 ? -order : order, x, ErrnoPolicy());
}

double bessel(BesselKind kind, int order, double x) {
  if (order < 0 || order > 64) {
    throw Error(ErrorCode::OutOfDomain, "numerics", "Bessel order outside 0..64");
  }
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw Error(ErrorCode::OutOfDomain, "numerics", "Bessel argument must be finite and > 0");
  }
  double v = 0.0;
  switch (kind) {
    case BesselKind::J: v = bessel_j(order, x); break;
    case BesselKind::Jp: v = 0.5 * (bessel_j(order - 1, x) - bessel_j(order + 1, x)); break;
    case BesselKind::K: v = bessel_k(order, x); break;
    case BesselKind::Kp: v = -0.5 * (bessel_k(order - 1, x) + bessel_k(order + 1, x)); break;
  }
  const bool is_k = kind == BesselKind::K || kind == BesselKind::Kp;
  if (!std::isfinite(v) || (is_k && v == 0.0) ||
      (is_k && std::abs(v) < std::numeric_limits<double>::min())) {
    throw Error(ErrorCode::Overflow, "numerics", "Bessel K outside the representable range");
  }
  return v;
}

double trapezoid_uniform(const std::vector<double>& y, double h) {
  if (y.size() < 2) return 0.0;
  CompensatedSum<double> s;
  s.add(0.5 * y.front());
  for (std::size_t i = 1; i + 1 < y.size(); ++i) s.add(y[i]);
  s.add(0.5 * y.back());
  return s.value() * h;
}

cplx exp_integral(double q, double L) {
  if (q == 0.0) return L;
  // exp(i x) - 1 = -2 sin^2(x/2) + i sin x, no cancellation near x = 0
  const double x = q * L;
  const double h = std::sin(0.5 * x);
  return cplx(-2.0 * h * h, std::sin(x)) / cplx(0.0, q);
}

}  // namespace oamfwm
