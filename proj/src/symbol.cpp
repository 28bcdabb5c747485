#include "tubesolv/symbol.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "tubesolv/parallel.hpp"

namespace tubesolv {

int freq_gcd(const Freq& xi) {
  int g = 0;
  for (int i = 0; i < xi.size(); ++i) g = std::gcd(g, std::abs(xi[i]));
  return g;
}

namespace {

ArrayXc separable_samples(const SeparableSymbol& s, const CircleGrid& grid, Real r) {
  const Real q = s.q(r);
  ArrayXc out(grid.n);
  for (int j = 0; j < grid.n; ++j) {
    const Real t = grid.node(j);
    out[j] = Complex(s.a(t) * q, s.b(t) * q);
  }
  return out;
}

ArrayXc homogeneous_samples(const HomogeneousSymbol& s, Real m, const CircleGrid& grid,
                            const Freq& xi) {
  const int g = freq_gcd(xi);
  if (g == 0) return ArrayXc::Zero(grid.n);
  const Freq xihat = xi / g;
  const Real rhat = FrequencyBox::norm_of(xihat);
  // base on the primitive direction, scaled by the homogeneity law
  const Real base_scale = std::pow(rhat, m);
  const Real scale = std::pow(Real(g), m);
  ArrayXc out(grid.n);
  for (int j = 0; j < grid.n; ++j) {
    const Real t = grid.node(j);
    out[j] = scale * Complex(s.a(t) * base_scale, s.b(t) * base_scale);
  }
  return out;
}

} // namespace

ArrayXc symbol_samples(const SymbolSpec& spec, const CircleGrid& grid, const Freq& xi) {
  const Real r = FrequencyBox::norm_of(xi);
  if (const auto* c = std::get_if<ConstantSymbol>(&spec.variant)) {
    return ArrayXc::Constant(grid.n, Complex(c->re(r), c->im(r)));
  }
  if (const auto* s = std::get_if<SeparableSymbol>(&spec.variant)) {
    return separable_samples(*s, grid, r);
  }
  if (const auto* h = std::get_if<HomogeneousSymbol>(&spec.variant)) {
    return homogeneous_samples(*h, spec.order, grid, xi);
  }
  if (const auto* hl = std::get_if<HomogeneousPlusLowerSymbol>(&spec.variant)) {
    if (!(hl->lower_order < spec.order))
      throw std::invalid_argument("HomogeneousPlusLower: remainder order must be below the principal order");
    return homogeneous_samples(hl->principal, spec.order, grid, xi) +
           separable_samples(hl->lower, grid, r);
  }
  const auto& tab = std::get<TabulatedSymbol>(spec.variant);
  if (tab.samples.grid.n != grid.n)
    throw std::invalid_argument("Tabulated symbol: grid mismatch (tabulated n_t = " +
                                std::to_string(tab.samples.grid.n) + ", requested " +
                                std::to_string(grid.n) + ")");
  const int i = tab.samples.box.index_of(xi);
  if (i < 0)
    throw std::invalid_argument("Tabulated symbol: frequency " + freq_to_string(xi) + " not tabulated");
  return tab.samples.slice(i);
}

Complex symbol_c0(const SymbolSpec& spec, const CircleGrid& grid, const Freq& xi) {
  return symbol_samples(spec, grid, xi).mean();
}

bool resonance_test(Real a0, Real b0, Real eps_z, Real* margin) {
  const Real dist = std::abs(a0 - std::round(a0));
  if (margin) *margin = std::hypot(dist, b0);
  return dist <= eps_z && std::abs(b0) <= eps_z;
}

bool resonance_test(const ModeProfile& profile, Real eps_z) {
  return resonance_test(profile.a0, profile.b0, eps_z, nullptr);
}

ModeProfile evaluate_mode(const SymbolSpec& spec, const CircleGrid& grid, const Freq& xi,
                          const EvalOptions& opts) {
  ModeProfile p;
  p.grid = grid;
  p.xi = xi;
  p.r = FrequencyBox::norm_of(xi);
  const ArrayXc c = symbol_samples(spec, grid, xi);
  if (!c.allFinite()) throw std::invalid_argument("symbol samples not finite at " + freq_to_string(xi));
  p.a = c.real();
  p.b = c.imag();
  p.a0 = p.a.mean();
  p.b0 = p.b.mean();
  p.A = spectral_primitive(grid, p.a, opts.basepoint);
  p.B = spectral_primitive(grid, p.b, opts.basepoint);
  p.A_per = periodic_primitive(grid, p.a);
  p.B_per = periodic_primitive(grid, p.b);
  p.resonant = resonance_test(p.a0, p.b0, opts.eps_z, &p.res_margin);
  p.c0_round = int(std::lround(p.a0));
  // argmax over the zero-mean periodic part: for resonant modes B is periodic
  // up to the eps_z ramp, and this choice is basepoint-independent even when
  // the maximum is attained on a plateau
  int best = 0;
  for (int j = 1; j < grid.n; ++j)
    if (p.B_per[j] > p.B_per[best]) best = j;  // ties keep the smallest index
  p.t_xi_index = best;
  return p;
}

std::vector<ModeProfile> evaluate(const SymbolSpec& spec, const CircleGrid& grid,
                                  const FrequencyBox& box, const EvalOptions& opts) {
  std::vector<ModeProfile> profiles(box.size());
  parallel_for(
      box.size(), [&](int i) { profiles[i] = evaluate_mode(spec, grid, box[i], opts); },
      opts.threads);
  return profiles;
}

std::array<Real, 3> symbol_class_constants(const SymbolSpec& spec, const CircleGrid& grid,
                                           const FrequencyBox& box) {
  std::vector<std::array<Real, 3>> per(box.size());
  parallel_for(box.size(), [&](int i) {
    const ArrayXc c = symbol_samples(spec, grid, box[i]);
    const Real w = std::pow(1 + box.norms[i], spec.order);
    ArrayXc d = c;
    for (int alpha = 0; alpha <= 2; ++alpha) {
      per[i][alpha] = d.abs().maxCoeff() / w;
      if (alpha < 2) d = spectral_Dt(grid, d, 1);
    }
  });
  std::array<Real, 3> out{0, 0, 0};
  for (const auto& v : per)
    for (int a = 0; a < 3; ++a) out[a] = std::max(out[a], v[a]);
  return out;
}

} // namespace tubesolv
