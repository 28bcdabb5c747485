#include <doctest.h>

#include "support.hpp"
#include "tubesolv/decay.hpp"

using namespace tubesolv;
using tstest::random_bandlimited;

TEST_CASE("analyze picks out a pure mode") {
  CircleGrid grid(16);
  ArrayXc h(grid.n);
  for (int j = 0; j < grid.n; ++j) h[j] = std::exp(Complex(0, grid.node(j)));
  const ArrayXc c = analyze(grid, h);
  for (int k = 0; k < grid.n; ++k) {
    const Real expect = signed_freq(k, grid.n) == 1 ? 1.0 : 0.0;
    CHECK(std::abs(c[k] - expect) < 1e-13);
  }
}

TEST_CASE("analyze of a constant is the zero mode") {
  CircleGrid grid(32);
  const ArrayXc c = analyze(grid, ArrayXc::Constant(32, Complex(1, 0)));
  CHECK(std::abs(c[0] - 1.0) < 1e-14);
  for (int k = 1; k < 32; ++k) CHECK(std::abs(c[k]) < 1e-14);
}

TEST_CASE("analyze rejects non-finite input") {
  CircleGrid grid(16);
  ArrayXc h = ArrayXc::Zero(16);
  h[3] = Complex(std::numeric_limits<Real>::quiet_NaN(), 0);
  CHECK_THROWS_AS(analyze(grid, h), std::invalid_argument);
}

TEST_CASE("round trip and Parseval on random smooth samples") {
  CircleGrid grid(128);
  for (unsigned seed : {1u, 2u, 3u, 4u, 5u}) {
    const ArrayXc h = random_bandlimited(grid, 40, 1.5, seed);
    const ArrayXc c = analyze(grid, h);
    const ArrayXc back = synthesize(grid, c);
    CHECK((back - h).abs().maxCoeff() / h.abs().maxCoeff() < 1e-12);

    const Real lhs = h.abs2().mean();          // (1/n) sum |h|^2
    const Real rhs = c.abs2().sum();
    CHECK(std::abs(lhs - rhs) / lhs < 1e-12);
  }
}

TEST_CASE("spectral primitive of cos is sin") {
  CircleGrid grid(64);
  ArrayXr h(grid.n), want(grid.n);
  for (int j = 0; j < grid.n; ++j) {
    h[j] = std::cos(grid.node(j));
    want[j] = std::sin(grid.node(j));
  }
  const Primitive H = spectral_primitive(grid, h, 0);
  CHECK((H.values - want).abs().maxCoeff() < 1e-13);
  CHECK(std::abs(H.mean) < 1e-15);
}

TEST_CASE("spectral primitive of a constant is the bare ramp") {
  CircleGrid grid(64);
  const Primitive H = spectral_primitive(grid, ArrayXr::Ones(64), 0);
  for (int j = 0; j < grid.n; ++j) CHECK(H.values[j] == doctest::Approx(grid.node(j)).epsilon(1e-13));
  CHECK(H.mean == doctest::Approx(1.0));
}

TEST_CASE("ramp dominates: H(2 pi) - H(0) = 2 pi for sin t + 1") {
  CircleGrid grid(64);
  ArrayXr h(grid.n);
  for (int j = 0; j < grid.n; ++j) h[j] = std::sin(grid.node(j)) + 1;
  const Primitive H = spectral_primitive(grid, h, 0);
  CHECK(H.lifted(grid.n) - H.lifted(0) == doctest::Approx(kTwoPi).epsilon(1e-13));
}

TEST_CASE("ramp law matches the mean for random samples") {
  CircleGrid grid(96);
  for (unsigned seed : {11u, 12u, 13u}) {
    const ArrayXr h = tstest::random_bandlimited_real(grid, 20, 1.0, seed);
    const Primitive H = spectral_primitive(grid, h, 0);
    for (long j : {-96L, 5L, 200L})
      CHECK(H.lifted(j + grid.n) - H.lifted(j) == doctest::Approx(kTwoPi * H.mean).epsilon(1e-12));
  }
}

TEST_CASE("primitive then derivative recovers band-limited samples") {
  CircleGrid grid(128);
  const ArrayXr h = tstest::random_bandlimited_real(grid, 30, 1.0, 21u);
  const Primitive H = spectral_primitive(grid, h, 0);
  // d/dt of the periodic part plus the ramp slope
  const ArrayXr per = H.values - H.mean * (ArrayXr::LinSpaced(grid.n, 0, grid.n - 1) * grid.step() -
                                           grid.node(H.basepoint));
  const ArrayXr dd = spectral_ddt(grid, per) + H.mean;
  CHECK((dd - h).abs().maxCoeff() < 1e-10);
}

TEST_CASE("trapezoid primitive agrees with the spectral one at second order") {
  CircleGrid coarse(128), fine(256);
  ArrayXr hc(coarse.n), hf(fine.n);
  auto fn = [](Real t) { return std::sin(t) + 0.3 * std::cos(3 * t) + 0.5; };
  for (int j = 0; j < coarse.n; ++j) hc[j] = fn(coarse.node(j));
  for (int j = 0; j < fine.n; ++j) hf[j] = fn(fine.node(j));
  const Real err_c = (trapezoid_primitive(coarse, hc, 0).values -
                      spectral_primitive(coarse, hc, 0).values)
                         .abs()
                         .maxCoeff();
  const Real err_f =
      (trapezoid_primitive(fine, hf, 0).values - spectral_primitive(fine, hf, 0).values)
          .abs()
          .maxCoeff();
  CHECK(err_c < 1e-3);
  CHECK(err_f < err_c / 3.5);  // second-order convergence of the oracle
}

TEST_CASE("basepoint only shifts the primitive by a constant") {
  CircleGrid grid(64);
  const ArrayXr h = tstest::random_bandlimited_real(grid, 10, 1.0, 31u);
  const Primitive H0 = spectral_primitive(grid, h, 0);
  const Primitive H7 = spectral_primitive(grid, h, 7);
  const ArrayXr diff = H0.values - H7.values;
  CHECK((diff - diff[0]).abs().maxCoeff() < 1e-12);
  CHECK(std::abs(H7.values[7]) < 1e-13);
}

TEST_CASE("decay fit recovers a planted power law") {
  CircleGrid grid(32);
  FrequencyBox box(1, 40);
  FourierField f(grid, box);
  for (int i = 0; i < box.size(); ++i) {
    const Real amp = std::pow(1 + box.norms[i], -5.0);
    ArrayXc col(grid.n);
    for (int j = 0; j < grid.n; ++j) col[j] = amp * std::exp(Complex(0, grid.node(j)));
    f.set_slice(i, col);
  }
  const DecayFit fit = decay_fit(f, 0);
  CHECK(fit.exponent == doctest::Approx(5.0).epsilon(0.01));
  CHECK(fit.residual < 1e-10);
}

TEST_CASE("derivative of a time-constant field hits the zero sentinel") {
  CircleGrid grid(32);
  FrequencyBox box(1, 40);
  FourierField f(grid, box);
  for (int i = 0; i < box.size(); ++i)
    f.set_slice(i, ArrayXc::Constant(grid.n, std::pow(1 + box.norms[i], -2.0)));
  const DecayFit fit0 = decay_fit(f, 0);
  CHECK(fit0.exponent == doctest::Approx(2.0).epsilon(0.01));
  const DecayFit fit1 = decay_fit(f, 1);  // D_t annihilates every slice
  CHECK(fit1.identically_zero);
  CHECK(std::isinf(fit1.exponent));
}

TEST_CASE("decay fit requires enough nonzero frequencies") {
  CircleGrid grid(16);
  FrequencyBox box(1, 3);
  FourierField f(grid, box);
  CHECK_THROWS_AS(decay_fit(f, 0), std::invalid_argument);
}
