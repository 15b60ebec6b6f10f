#pragma once

#include <oamfwm/errors.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <queue>
#include <type_traits>
#include <vector>

namespace oamfwm {

using cplx = std::complex<double>;

struct QuadratureSpec {
  double relative_tolerance = 1e-10;
  double absolute_tolerance = 1e-14;
  int max_subdivisions = 4000;

  void validate() const;
};

struct RootSpec {
  double bracket_lo = 0.0;
  double bracket_hi = 1.0;
  double tolerance = 1e-12;

  void validate() const;
};

// Carries the best estimate when adaptive quadrature gives up.
class QuadratureError : public Error {
 public:
  QuadratureError(cplx estimate, double error_bound, const std::string& message)
      : Error(ErrorCode::MaxSubdivisionsExceeded, "numerics", message),
        estimate_(estimate),
        error_bound_(error_bound) {}

  cplx estimate() const noexcept { return estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  cplx estimate_;
  double error_bound_;
};

double find_root(const std::function<double(double)>& f, const RootSpec& spec);

enum class BesselKind { J, Jp, K, Kp };

// Checked evaluation; throws OutOfDomain / Overflow.
double bessel(BesselKind kind, int order, double x);

// Unchecked fast paths used inside integrands. Orders may be negative.
double bessel_j(int order, double x);
double bessel_k(int order, double x);

namespace detail {

// Gauss-Kronrod 7/15 nodes on [-1, 1].
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
double magnitude(const T& v) {
  return std::abs(v);
}

template <class T>
struct Segment {
  double a, b;
  T value;
  double error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class T, class F>
Segment<T> gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const T fc = f(c);
  T kronrod = fc * kWgk[7];
  T gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const T f1 = f(c - dx);
    const T f2 = f(c + dx);
    if (!std::isfinite(magnitude(f1)) || !std::isfinite(magnitude(f2))) {
      throw Error(ErrorCode::NonFinite, "numerics", "integrand returned a non-finite value");
    }
    kronrod += (f1 + f2) * kWgk[j];
    if (j % 2 == 1) gauss += (f1 + f2) * kWg[j / 2];
  }
  if (!std::isfinite(magnitude(fc))) {
    throw Error(ErrorCode::NonFinite, "numerics", "integrand returned a non-finite value");
  }
  return {a, b, kronrod * h, magnitude((kronrod - gauss) * h)};
}

}  // namespace detail

// Adaptive Gauss-Kronrod on [a, b], with optional interior breakpoints
// seeding the initial partition. Works for double and complex integrands.
template <class F>
auto integrate(F&& f, double a, double b, const QuadratureSpec& spec,
               const std::vector<double>& breakpoints = {}) {
  using T = std::decay_t<decltype(f(a))>;
  static_assert(std::is_same_v<T, double> || std::is_same_v<T, cplx>,
                "integrand must return double or std::complex<double>");
  spec.validate();
  if (!(a < b)) {
    throw Error(ErrorCode::InvalidArgument, "numerics", "integrate requires a < b");
  }
  std::vector<double> cuts{a};
  for (double p : breakpoints) {
    if (p > a && p < b) cuts.push_back(p);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());

  std::priority_queue<detail::Segment<T>> heap;
  T total{};
  double err = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    auto s = detail::gk15<T>(f, cuts[i], cuts[i + 1]);
    total += s.value;
    err += s.error;
    heap.push(s);
  }
  int subdivisions = static_cast<int>(heap.size());
  while (err > std::max(spec.absolute_tolerance,
                        spec.relative_tolerance * detail::magnitude(total))) {
    if (subdivisions >= spec.max_subdivisions) {
      throw QuadratureError(cplx(total), err, "adaptive quadrature did not converge");
    }
    auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      throw QuadratureError(cplx(total), err, "interval collapsed below machine resolution");
    }
    auto left = detail::gk15<T>(f, worst.a, mid);
    auto right = detail::gk15<T>(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++subdivisions;
  }
  // Re-sum to shed drift from the incremental updates.
  T sum{};
  while (!heap.empty()) {
    sum += heap.top().value;
    heap.pop();
  }
  return sum;
}

// Neumaier-compensated running sum.
template <class T>
class CompensatedSum {
 public:
  void add(T x) {
    const T t = sum_ + x;
    if constexpr (std::is_same_v<T, double>) {
      comp_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
    } else {
      comp_ += T(part(sum_.real(), x.real(), t.real()), part(sum_.imag(), x.imag(), t.imag()));
    }
    sum_ = t;
  }
  T value() const { return sum_ + comp_; }

 private:
  static double part(double s, double x, double t) {
    return std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
  }
  T sum_{};
  T comp_{};
};

// Trapezoid over samples y on a uniform grid of spacing h, compensated.
double trapezoid_uniform(const std::vector<double>& y, double h);

// Int_0^L exp(i q z) dz, stable as q -> 0.
cplx exp_integral(double q, double L);

// Barycentric interpolation on Chebyshev points of the second kind over [a, b].
template <class T>
class Chebyshev {
 public:
  Chebyshev() = default;
  template <class F>
  Chebyshev(F&& f, double a, double b, int n) : a_(a), b_(b) {
    if (!(a < b) || n < 2) {
      throw Error(ErrorCode::InvalidArgument, "numerics", "Chebyshev needs a < b and n >= 2");
    }
    x_.resize(n);
    y_.resize(n);
    for (int j = 0; j < n; ++j) {
      x_[j] = 0.5 * (a + b) + 0.5 * (b - a) * std::cos(3.14159265358979323846 * j / (n - 1));
    }
    for (int j = 0; j < n; ++j) y_[j] = f(x_[j]);
  }
  // Build from values already computed at nodes(a, b, n).
  Chebyshev(double a, double b, std::vector<T> values) : a_(a), b_(b), y_(std::move(values)) {
    x_ = nodes(a, b, static_cast<int>(y_.size()));
  }

  static std::vector<double> nodes(double a, double b, int n) {
    std::vector<double> x(n);
    for (int j = 0; j < n; ++j) {
      x[j] = 0.5 * (a + b) + 0.5 * (b - a) * std::cos(3.14159265358979323846 * j / (n - 1));
    }
    return x;
  }

  T operator()(double x) const {
    const int n = static_cast<int>(x_.size());
    T num{};
    double den = 0.0;
    for (int j = 0; j < n; ++j) {
      const double dx = x - x_[j];
      if (dx == 0.0) return y_[j];
      double w = (j % 2 == 0) ? 1.0 : -1.0;
      if (j == 0 || j == n - 1) w *= 0.5;
      w /= dx;
      num += y_[j] * w;
      den += w;
    }
    return num / den;
  }
  double lo() const { return a_; }
  double hi() const { return b_; }

 private:
  double a_ = 0.0, b_ = 1.0;
  std::vector<double> x_;
  std::vector<T> y_;
};

}  // namespace oamfwm
