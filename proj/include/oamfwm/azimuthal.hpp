#pragma once

#include <oamfwm/numerics.hpp>

#include <span>

namespace oamfwm {

// One angular factor of a field component: cos(n phi), sin(n phi) or exp(i n phi).
struct Angular {
  enum class Kind { Cos, Sin, Exp };
  Kind kind = Kind::Exp;
  int n = 0;

  static Angular cos(int n) { return {Kind::Cos, n}; }
  static Angular sin(int n) { return {Kind::Sin, n}; }
  static Angular exp(int n) { return {Kind::Exp, n}; }

  cplx operator()(double phi) const;
  Angular conj() const { return kind == Kind::Exp ? Angular{Kind::Exp, -n} : *this; }
  bool operator==(const Angular&) const = default;
};

// Exact integral over [0, 2 pi) of the product of the factors, obtained by
// expanding into exponentials. Zero results are exact zeros.
cplx angular_integral(std::span<const Angular> factors);

// Brute-force version: uniform trapezoid with `points` samples.
cplx angular_integral_sampled(std::span<const Angular> factors, int points);

}  // namespace oamfwm
