#pragma once

#include <cmath>
#include <limits>

#include "tubesolv/types.hpp"

namespace tubesolv {

// Complex value stored as (log-magnitude, phase) so products of exponentially
// large or small factors never overflow.  Conversion back to an ordinary
// complex is only meaningful while log_mag stays below the overflow guard;
// past it the saturation flag must be propagated by the caller.
struct LogComplex {
  Real log_mag = -std::numeric_limits<Real>::infinity();
  Real phase = 0;  // kept in (-pi, pi]

  static Real reduce_phase(Real p) {
    Real r = std::remainder(p, kTwoPi);
    if (r <= -kTwoPi / 2) r += kTwoPi;
    return r;
  }

  static LogComplex from(Complex z) {
    LogComplex l;
    const Real m = std::abs(z);
    l.log_mag = m > 0 ? std::log(m) : -std::numeric_limits<Real>::infinity();
    l.phase = m > 0 ? std::arg(z) : 0;
    return l;
  }

  // the value e^z for a complex exponent z
  static LogComplex exp_of(Complex z) {
    LogComplex l;
    l.log_mag = z.real();
    l.phase = reduce_phase(z.imag());
    return l;
  }

  LogComplex operator*(const LogComplex& other) const {
    LogComplex l;
    l.log_mag = log_mag + other.log_mag;
    l.phase = reduce_phase(phase + other.phase);
    return l;
  }

  bool saturated() const { return log_mag > kOverflowGuard; }

  // finite by construction: the magnitude is clamped at the overflow guard,
  // so callers must consult saturated() to learn whether clamping happened
  Complex value() const {
    if (log_mag == -std::numeric_limits<Real>::infinity()) return Complex(0, 0);
    const Real m = std::exp(std::min(log_mag, kOverflowGuard));
    return Complex(m * std::cos(phase), m * std::sin(phase));
  }
};

// e^z - 1 without cancellation for small |z|
inline Complex cexpm1(Complex z) {
  const Real x = z.real(), y = z.imag();
  const Real em = std::expm1(x);
  const Real s = std::sin(y / 2);
  return Complex(em * std::cos(y) - 2 * s * s, (1 + em) * std::sin(y));
}

} // namespace tubesolv
