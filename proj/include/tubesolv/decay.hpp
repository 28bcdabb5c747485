#pragma once

#include <vector>

#include "tubesolv/field.hpp"

namespace tubesolv {

// Least-squares fit of log sup_t |D_t^alpha F(.,xi)| against log(1+|xi|):
// sup_t |F| ~ constant * (1+|xi|)^{-exponent}.
struct DecayFit {
  Real exponent = 0;  // +infinity sentinel when the field is identically zero
  Real constant = 0;
  Real residual = 0;  // rms residual of the fit in log-log coordinates
  int points = 0;
  bool identically_zero = false;
};

// Core fit on precomputed points x = log(1+|xi|), y = log sup.  Points with
// y = -infinity are treated as zero slices and dropped.
DecayFit decay_fit_points(const std::vector<Real>& x, const std::vector<Real>& y);

// Derivative applied spectrally per xi-slice before taking sup_t.
// Requires at least 8 nonzero frequencies in the box.
DecayFit decay_fit(const FourierField& field, int derivative_order = 0);

} // namespace tubesolv
