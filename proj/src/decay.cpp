#include "tubesolv/decay.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "tubesolv/fourier.hpp"

namespace tubesolv {

DecayFit decay_fit_points(const std::vector<Real>& x, const std::vector<Real>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("decay_fit_points: size mismatch");
  DecayFit fit;
  std::vector<Real> xs, ys;
  for (size_t i = 0; i < x.size(); ++i) {
    if (std::isfinite(y[i])) {
      xs.push_back(x[i]);
      ys.push_back(y[i]);
    }
  }
  fit.points = int(xs.size());
  if (fit.points < 2) {
    fit.identically_zero = true;
    fit.exponent = std::numeric_limits<Real>::infinity();
    return fit;
  }
  Real sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < fit.points; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const Real n = fit.points;
  const Real det = n * sxx - sx * sx;
  if (det <= 0) throw std::invalid_argument("decay_fit_points: degenerate abscissae");
  const Real slope = (n * sxy - sx * sy) / det;
  const Real intercept = (sy - slope * sx) / n;
  fit.exponent = -slope;
  fit.constant = std::exp(intercept);
  Real ss = 0;
  for (int i = 0; i < fit.points; ++i) {
    const Real r = ys[i] - (intercept + slope * xs[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

DecayFit decay_fit(const FourierField& field, int derivative_order) {
  field.validate();
  int nonzero_freqs = 0;
  for (int i = 0; i < field.box.size(); ++i)
    if (field.box.norms[i] > 0) ++nonzero_freqs;
  if (nonzero_freqs < 8)
    throw std::invalid_argument("decay_fit: box must contain at least 8 nonzero frequencies");

  std::vector<Real> x, y;
  for (int i = 0; i < field.box.size(); ++i) {
    const Real r = field.box.norms[i];
    if (!(r > 0)) continue;  // fit uses only nonzero frequencies
    ArrayXc slice = field.slice(i);
    if (derivative_order > 0) slice = spectral_Dt(field.grid, slice, derivative_order);
    const Real sup = slice.abs().maxCoeff();
    x.push_back(std::log1p(r));
    y.push_back(sup > 0 ? std::log(sup) : -std::numeric_limits<Real>::infinity());
  }
  return decay_fit_points(x, y);
}

} // namespace tubesolv
