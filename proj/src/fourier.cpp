#include "tubesolv/fourier.hpp"

#include <stdexcept>

#include <unsupported/Eigen/FFT>

namespace tubesolv {

namespace {

Eigen::FFT<Real>& fft_engine() {
  thread_local Eigen::FFT<Real> fft;
  return fft;
}

void check_size(const CircleGrid& grid, long size, const char* who) {
  if (grid.n < 8) throw std::invalid_argument(std::string(who) + ": grid not initialized");
  if (size != grid.n)
    throw std::invalid_argument(std::string(who) + ": expected " + std::to_string(grid.n) +
                                " samples, got " + std::to_string(size));
}

} // namespace

ArrayXc analyze(const CircleGrid& grid, const ArrayXc& samples) {
  check_size(grid, samples.size(), "analyze");
  if (!samples.allFinite()) throw std::invalid_argument("analyze: non-finite input sample");
  Eigen::VectorXcd in = samples.matrix();
  Eigen::VectorXcd out(grid.n);
  fft_engine().fwd(out, in);
  return out.array() / Real(grid.n);
}

ArrayXc synthesize(const CircleGrid& grid, const ArrayXc& coeffs) {
  check_size(grid, coeffs.size(), "synthesize");
  Eigen::VectorXcd in = (coeffs * Real(grid.n)).matrix();
  Eigen::VectorXcd out(grid.n);
  fft_engine().inv(out, in);
  return out.array();
}

ArrayXc spectral_Dt(const CircleGrid& grid, const ArrayXc& samples, int order) {
  ArrayXc c = analyze(grid, samples);
  for (int k = 0; k < grid.n; ++k) {
    const Real kappa = signed_freq(k, grid.n);
    Real w = 1;
    for (int a = 0; a < order; ++a) w *= kappa;
    c[k] *= w;
  }
  return synthesize(grid, c);
}

ArrayXr spectral_ddt(const CircleGrid& grid, const ArrayXr& samples) {
  ArrayXc c = analyze(grid, samples.cast<Complex>());
  for (int k = 0; k < grid.n; ++k) c[k] *= Complex(0, signed_freq(k, grid.n));
  return synthesize(grid, c).real();
}

ArrayXc periodic_primitive(const CircleGrid& grid, const ArrayXc& samples) {
  ArrayXc c = analyze(grid, samples);
  c[0] = Complex(0, 0);
  for (int k = 1; k < grid.n; ++k) c[k] /= Complex(0, signed_freq(k, grid.n));
  return synthesize(grid, c);
}

ArrayXr periodic_primitive(const CircleGrid& grid, const ArrayXr& samples) {
  return periodic_primitive(grid, samples.cast<Complex>().eval()).real();
}

Primitive spectral_primitive(const CircleGrid& grid, const ArrayXr& samples, int basepoint) {
  check_size(grid, samples.size(), "spectral_primitive");
  if (basepoint < 0 || basepoint >= grid.n)
    throw std::invalid_argument("spectral_primitive: basepoint outside the grid");
  Primitive p;
  p.n = grid.n;
  p.mean = samples.mean();
  p.basepoint = basepoint;
  ArrayXr per = periodic_primitive(grid, samples);
  p.values = p.mean * (ArrayXr::LinSpaced(grid.n, 0, grid.n - 1) * grid.step() - grid.node(basepoint)) +
             (per - per[basepoint]);
  return p;
}

Primitive trapezoid_primitive(const CircleGrid& grid, const ArrayXr& samples, int basepoint) {
  check_size(grid, samples.size(), "trapezoid_primitive");
  Primitive p;
  p.n = grid.n;
  p.mean = samples.mean();
  p.basepoint = basepoint;
  ArrayXr cum(grid.n);
  cum[0] = 0;
  const Real h = grid.step();
  for (int j = 1; j < grid.n; ++j) cum[j] = cum[j - 1] + Real(0.5) * h * (samples[j - 1] + samples[j]);
  p.values = cum - cum[basepoint];
  return p;
}

} // namespace tubesolv
