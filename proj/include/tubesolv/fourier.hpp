#pragma once

#include "tubesolv/grid.hpp"

namespace tubesolv {

// Coefficients are kept in FFT slot order; slot k holds mode kappa = signed_freq(k, n)
// with kappa in [-n/2, n/2).
inline int signed_freq(int slot, int n) { return slot < n / 2 ? slot : slot - n; }

// h(t_j) -> hhat with h(t) = sum_kappa hhat(kappa) e^{i kappa t}.
// Parseval: (1/n) sum_j |h_j|^2 = sum_kappa |hhat_kappa|^2.
// Rejects non-finite input.
ArrayXc analyze(const CircleGrid& grid, const ArrayXc& samples);
ArrayXc synthesize(const CircleGrid& grid, const ArrayXc& coeffs);

// D_t = -i d/dt, i.e. multiplication of mode kappa by kappa^order.
ArrayXc spectral_Dt(const CircleGrid& grid, const ArrayXc& samples, int order = 1);

// d/dt (multiplication by i*kappa), real samples in, real samples out.
ArrayXr spectral_ddt(const CircleGrid& grid, const ArrayXr& samples);

// Zero-mean periodic primitive of the oscillating part h - mean(h)
// (mode kappa != 0 divided by i*kappa, mode 0 dropped).
ArrayXr periodic_primitive(const CircleGrid& grid, const ArrayXr& samples);
ArrayXc periodic_primitive(const CircleGrid& grid, const ArrayXc& samples);

// Primitive H of h with H(t_basepoint) = 0.  The linear ramp mean(h)*t is carried
// explicitly, so the lifted evaluation obeys H(t + 2*pi) = H(t) + 2*pi*mean(h).
struct Primitive {
  int n = 0;
  ArrayXr values;  // H at the nodes of [0, 2*pi)
  Real mean = 0;   // ramp slope h0
  int basepoint = 0;

  // lifted value at any node index j in Z
  Real lifted(long j) const {
    long q = j >= 0 ? j / n : -((-j + n - 1) / n);
    return values[int(j - q * long(n))] + kTwoPi * mean * Real(q);
  }
};

Primitive spectral_primitive(const CircleGrid& grid, const ArrayXr& samples, int basepoint = 0);

// Independent low-order oracle used by tests: cumulative trapezoid plus ramp.
Primitive trapezoid_primitive(const CircleGrid& grid, const ArrayXr& samples, int basepoint = 0);

} // namespace tubesolv
