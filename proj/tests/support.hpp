#pragma once

// Shared test helpers: deterministic generators and independent brute-force
// oracles.  The oracles deliberately avoid the library's sliding-window and
// spectral shortcuts so agreement is meaningful.

#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "tubesolv/conditions.hpp"
#include "tubesolv/fourier.hpp"
#include "tubesolv/symbol.hpp"

namespace tstest {

using namespace tubesolv;

inline std::mt19937& rng(unsigned seed = 0) {
  static std::mt19937 gen(12345);
  if (seed) gen.seed(seed);
  return gen;
}

// random band-limited samples: trig polynomial of the given degree with
// coefficients decaying like (1+|kappa|)^{-decay}
inline ArrayXc random_bandlimited(const CircleGrid& grid, int degree, Real decay = 2,
                                  unsigned seed = 0) {
  auto& gen = rng(seed);
  std::uniform_real_distribution<Real> unif(-1, 1);
  ArrayXc coeffs = ArrayXc::Zero(grid.n);
  for (int k = 0; k < grid.n; ++k) {
    const int kappa = signed_freq(k, grid.n);
    if (std::abs(kappa) > degree) continue;
    const Real amp = std::pow(1.0 + std::abs(kappa), -decay);
    coeffs[k] = amp * Complex(unif(gen), unif(gen));
  }
  return synthesize(grid, coeffs);
}

inline ArrayXr random_bandlimited_real(const CircleGrid& grid, int degree, Real decay = 2,
                                       unsigned seed = 0) {
  return random_bandlimited(grid, degree, decay, seed).real();
}

// tabulated spec with c(t, xi) supplied per frequency by a callable
template <typename F>
SymbolSpec tabulated_symbol(const CircleGrid& grid, const FrequencyBox& box, Real order, F&& c) {
  TabulatedSymbol tab;
  tab.samples = FourierField(grid, box);
  for (int i = 0; i < box.size(); ++i) {
    ArrayXc col(grid.n);
    for (int j = 0; j < grid.n; ++j) col[j] = c(grid.node(j), box[i]);
    tab.samples.set_slice(i, col);
  }
  SymbolSpec spec;
  spec.order = order;
  spec.variant = tab;
  return spec;
}

// ---------------------------------------------------------------------------
// brute-force window oracles: direct enumeration of every node and window
// ---------------------------------------------------------------------------

inline Real oracle_alpha_star(const ModeProfile& p, int sign, Real m) {
  const int n = p.grid.n;
  if (m < 0 || std::pow(p.r, -m) >= kTwoPi) return 0;
  const Real delta = std::pow(p.r, -m);
  const int w = int(std::ceil(delta / p.grid.step() - 1e-12));
  Real worst = 0;
  for (int j0 = 0; j0 < n; ++j0) {
    const long t = sign > 0 ? j0 : j0 + n;
    Real minsup = std::numeric_limits<Real>::infinity();
    const long lo = sign > 0 ? t : t - n;
    const long hi = sign > 0 ? t + n - w : t - w;
    for (long tau = lo; tau <= hi; ++tau) {
      Real sup = -std::numeric_limits<Real>::infinity();
      for (long s = tau; s <= tau + w; ++s) sup = std::max(sup, p.B.lifted(s));
      minsup = std::min(minsup, sup);
    }
    worst = std::max(worst, std::max(0.0, p.B.lifted(t) - minsup));
  }
  return worst / std::log(p.r);
}

inline Real oracle_beta_star(const ModeProfile& p, Real m) {
  const int n = p.grid.n;
  if (m < 0 || std::pow(p.r, -m) >= kTwoPi) return 0;
  const Real delta = std::pow(p.r, -m);
  const int w = int(std::ceil(delta / p.grid.step() - 1e-12));
  const int jx = p.t_xi_index;
  auto window_sup = [&](long start) {
    Real sup = -std::numeric_limits<Real>::infinity();
    for (int s = 0; s <= w; ++s) sup = std::max(sup, p.B.values[p.grid.wrap(start + s)]);
    return sup;
  };
  Real worst = 0;
  for (int j = 0; j < n; ++j) {
    if (j == jx) continue;
    const int d = int((long(jx) - j + n) % n);   // arc [t_j, t_xi]
    const int d2 = n - d;                        // arc [t_xi, t_j]
    Real gap_a = -std::numeric_limits<Real>::infinity();
    for (int e = w; e <= d; ++e)
      gap_a = std::max(gap_a, p.B.values[j] - window_sup(long(jx) - e));
    Real gap_b = -std::numeric_limits<Real>::infinity();
    for (int g = 0; g + w <= d2; ++g)
      gap_b = std::max(gap_b, p.B.values[j] - window_sup(long(jx) + g));
    worst = std::max(worst, std::min(std::max(0.0, gap_a), std::max(0.0, gap_b)));
  }
  return worst / std::log(p.r);
}

} // namespace tstest
