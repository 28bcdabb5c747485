#include "tubesolv/counterexample.hpp"

#include <algorithm>
#include <cmath>

namespace tubesolv {

BumpSpec bump(const CircleGrid& grid, long start_node, int steps, Real plateau_fraction) {
  if (steps <= 4)
    throw std::invalid_argument("bump: window of " + std::to_string(steps) +
                                " steps is under-resolved (needs more than 4 grid steps)");
  if (steps > grid.n) throw std::invalid_argument("bump: window longer than the circle");
  if (!(plateau_fraction > 0) || !(plateau_fraction < 1))
    throw std::invalid_argument("bump: plateau fraction must lie in (0, 1)");

  BumpSpec b;
  b.start_node = start_node;
  b.steps = steps;
  b.plateau_fraction = plateau_fraction;
  b.samples = ArrayXr::Zero(grid.n);

  const Real wfrac = (1 - plateau_fraction) / 2;
  auto taper = [](Real y) {
    // y in (0, 1]: 0+ at the window end, 1 at the plateau edge
    if (y >= 1) return Real(1);
    const Real d = y * (2 - y);  // = 1 - (1 - y)^2
    return std::exp(1 - 1 / d);
  };
  for (int i = 1; i < steps; ++i) {
    const Real x = Real(i) / steps;
    Real v;
    if (x < wfrac) v = taper(x / wfrac);
    else if (x > 1 - wfrac) v = taper((1 - x) / wfrac);
    else v = 1;
    b.samples[grid.wrap(start_node + i)] = v;
  }
  b.integral = b.samples.sum() * grid.step();
  return b;
}

namespace {

std::vector<Freq> default_sequence(const FrequencyBox& box, int k_min, int k_max) {
  std::vector<Freq> seq;
  for (int k = k_min; k <= k_max; ++k) {
    Freq xi = Freq::Zero(box.N);
    const Real v = std::pow(2.0, k);
    if (v > box.K) break;
    xi[0] = int(v);
    seq.push_back(xi);
  }
  return seq;
}

std::vector<Freq> forge_sequence(const FrequencyBox& box, const ForgeOptions& opts) {
  std::vector<Freq> seq = opts.sequence.empty()
                              ? default_sequence(box, opts.k_min, opts.k_max)
                              : opts.sequence;
  if (seq.empty()) throw no_witness_error("forge: empty frequency sequence at this cutoff");
  for (size_t i = 0; i < seq.size(); ++i)
    for (size_t j = i + 1; j < seq.size(); ++j)
      if (seq[i] == seq[j])
        throw std::invalid_argument("forge: sequence repeats " + freq_to_string(seq[i]));
  for (const auto& xi : seq)
    if (box.index_of(xi) < 0)
      throw std::invalid_argument("forge: " + freq_to_string(xi) + " lies outside the box");
  return seq;
}

// argmax of the lifted primitive of b over [0, 2 pi] inclusive (node n means
// the endpoint t = 2 pi), ties resolved to the smallest index
long argmax_lifted_B(const ModeProfile& p) {
  long best = 0;
  Real best_v = p.B.lifted(0);
  for (long j = 1; j <= p.grid.n; ++j) {
    const Real v = p.B.lifted(j);
    if (v > best_v) {
      best_v = v;
      best = j;
    }
  }
  return best;
}

} // namespace

ForgedRHS forge_dc(const SymbolSpec& spec, const CircleGrid& grid, const FrequencyBox& box,
                   const ForgeOptions& opts) {
  ForgedRHS out;
  out.tag = "dc";
  out.field = FourierField(grid, box);
  const std::vector<Freq> seq = forge_sequence(box, opts);

  const Real h = grid.step();
  if (!(opts.interval_lo > 0) || !(opts.interval_hi < kTwoPi) ||
      !(opts.interval_lo < opts.interval_hi))
    throw std::invalid_argument("forge_dc: interval must satisfy 0 < lo < hi < 2 pi");
  const long a_node = long(std::ceil(opts.interval_lo / h - 1e-12));
  const long b_node = long(std::floor(opts.interval_hi / h + 1e-12));
  const BumpSpec phi = bump(grid, a_node, int(b_node - a_node), opts.plateau_fraction);
  out.phi_integral = phi.integral;

  int k = opts.k_min;
  for (const Freq& xi : seq) {
    ForgedMode fm;
    fm.xi = xi;
    fm.r = FrequencyBox::norm_of(xi);
    fm.k = k++;
    const ModeProfile p = evaluate_mode(spec, grid, xi, {opts.eps_z});
    if (p.resonant) {
      fm.ok = false;
      fm.note = "frequency is resonant; the small-divisor construction needs c0 outside Z";
      out.modes.push_back(fm);
      continue;
    }
    const long tk = argmax_lifted_B(p);
    const Real tk_real = grid.node(tk);
    fm.t_k = tk;
    if (tk_real > opts.interval_hi + 1e-12) {
      fm.variant = ModeBranch::NonResonantBackward;  // prefactor 1 - e^{-2 pi i c0}
    } else if (tk_real < opts.interval_lo - 1e-12) {
      fm.variant = ModeBranch::NonResonantForward;  // prefactor e^{2 pi i c0} - 1
    } else {
      fm.ok = false;
      fm.note = "maximizer of the b-primitive falls inside the bump interval";
      out.modes.push_back(fm);
      continue;
    }
    const Real dist = p.a0 - std::round(p.a0);
    const Complex w(dist, p.b0);
    fm.prefactor = fm.variant == ModeBranch::NonResonantBackward
                       ? -cexpm1(Complex(0, -kTwoPi) * w)
                       : cexpm1(Complex(0, kTwoPi) * w);
    fm.prefactor_abs = std::abs(fm.prefactor);

    const int i = box.index_of(xi);
    ArrayXc fhat = ArrayXc::Zero(grid.n);
    Real max_weight = 0;
    for (long j = a_node; j <= b_node; ++j) {
      const int jj = grid.wrap(j);
      if (phi.samples[jj] == 0) continue;
      // primitive based at t_k: C(t) - C(t_k), evaluated on the lift
      const Real dB = p.B.lifted(j) - p.B.lifted(tk);
      const Real dA = p.A.lifted(j) - p.A.lifted(tk);
      max_weight = std::max(max_weight, std::exp(dB));
      fhat[jj] = fm.prefactor * std::exp(Complex(dB, -dA)) * phi.samples[jj];
    }
    if (max_weight > 1 + 1e-10) {
      fm.ok = false;
      fm.note = "kernel smallness |e^{-iC}| <= 1 failed";
      out.modes.push_back(fm);
      continue;
    }
    out.field.set_slice(i, fhat);

    fm.target = phi.integral;
    const ModeSolution u = solve_mode_nonresonant(p, fhat, opts.solver);
    fm.measured = u.saturated ? u.sup_norm() : std::abs(u.u[grid.wrap(tk)]);
    out.modes.push_back(fm);
  }
  if (std::none_of(out.modes.begin(), out.modes.end(), [](const ForgedMode& m) { return m.ok; }))
    throw no_witness_error("forge_dc: no usable mode in the sequence");
  return out;
}

ForgedRHS forge_alpha(const SymbolSpec& spec, const CircleGrid& grid, const FrequencyBox& box,
                      const ForgeOptions& opts) {
  ForgedRHS out;
  out.tag = "alpha";
  out.field = FourierField(grid, box);
  const std::vector<Freq> seq = forge_sequence(box, opts);

  int k = opts.k_min;
  for (const Freq& xi : seq) {
    ForgedMode fm;
    fm.xi = xi;
    fm.r = FrequencyBox::norm_of(xi);
    fm.k = k++;
    const ModeProfile p = evaluate_mode(spec, grid, xi, {opts.eps_z});
    if (p.resonant) {
      fm.ok = false;
      fm.note = "frequency is resonant; the forward/backward construction needs c0 outside Z";
      out.modes.push_back(fm);
      continue;
    }
    // the proof's side: forward witness when b0 >= 0, backward otherwise
    const int sign = p.b0 >= 0 ? +1 : -1;
    fm.variant = sign > 0 ? ModeBranch::NonResonantForward : ModeBranch::NonResonantBackward;
    const auto wt = alpha_violation_witness(p, sign, spec.order, Real(fm.k));
    if (!wt) {
      fm.ok = false;
      fm.note = "no violating window at scale k (condition holds here)";
      out.modes.push_back(fm);
      continue;
    }
    fm.t_k = wt->t_index;
    fm.win_start = wt->win_start;
    fm.win_steps = wt->win_steps;
    const Real dist = p.a0 - std::round(p.a0);
    const Complex w(dist, p.b0);
    fm.prefactor = sign > 0 ? cexpm1(Complex(0, kTwoPi) * w) : -cexpm1(Complex(0, -kTwoPi) * w);
    fm.prefactor_abs = std::abs(fm.prefactor);

    const BumpSpec phik = bump(grid, wt->win_start, wt->win_steps, opts.plateau_fraction);
    ArrayXc fhat = ArrayXc::Zero(grid.n);
    for (long j = wt->win_start; j <= wt->win_start + wt->win_steps; ++j) {
      const int jj = grid.wrap(j);
      if (phik.samples[jj] == 0) continue;
      // e^{i (C(t_k) - C(t))} phi_k(t) on the lifted window
      const Real dB = p.B.lifted(j) - p.B.lifted(wt->t_index);
      const Real dA = p.A.lifted(wt->t_index) - p.A.lifted(j);
      fhat[jj] = std::exp(Complex(dB, dA)) * phik.samples[jj];
    }
    const int i = box.index_of(xi);
    out.field.set_slice(i, fhat);

    fm.target = std::pow(fm.r, -spec.order) / 4;
    const ModeSolution u = solve_mode_nonresonant(p, fhat, opts.solver);
    fm.measured = u.saturated ? u.sup_norm() : std::abs(u.u[grid.wrap(wt->t_index)]);
    out.modes.push_back(fm);
  }
  if (std::none_of(out.modes.begin(), out.modes.end(), [](const ForgedMode& m) { return m.ok; }))
    throw no_witness_error("forge_alpha: the symbol satisfies the window conditions at this scale");
  return out;
}

ForgedRHS forge_beta(const SymbolSpec& spec, const CircleGrid& grid, const FrequencyBox& box,
                     const ForgeOptions& opts) {
  ForgedRHS out;
  out.tag = "beta";
  out.field = FourierField(grid, box);
  const std::vector<Freq> seq = forge_sequence(box, opts);
  const Real h = grid.step();

  int k = opts.k_min;
  for (const Freq& xi : seq) {
    ForgedMode fm;
    fm.xi = xi;
    fm.r = FrequencyBox::norm_of(xi);
    fm.k = k++;
    const ModeProfile p = evaluate_mode(spec, grid, xi, {opts.eps_z});
    if (!p.resonant) {
      fm.ok = false;
      fm.note = "frequency is not resonant; the kernel construction needs c0 in Z";
      out.modes.push_back(fm);
      continue;
    }
    const auto wt = beta_violation_witness(p, spec.order, Real(fm.k));
    if (!wt) {
      fm.ok = false;
      fm.note = "no violating window pair at scale k (condition holds here)";
      out.modes.push_back(fm);
      continue;
    }
    fm.t_k = wt->t_index;
    fm.win_start = wt->win_plus_start;
    fm.win2_start = wt->win_minus_start;
    fm.win_steps = wt->win_steps;

    // equal-length, equal-plateau bumps have identical sample multisets, so
    // their integrals cancel exactly in the compat functional
    const BumpSpec phip = bump(grid, wt->win_plus_start, wt->win_steps, opts.plateau_fraction);
    const BumpSpec phim = bump(grid, wt->win_minus_start, wt->win_steps, opts.plateau_fraction);
    const ArrayXr phik = phip.samples - phim.samples;

    const int jx = p.t_xi_index;
    ArrayXc fhat = ArrayXc::Zero(grid.n);
    ArrayXr phase(grid.n);
    for (int j = 0; j < grid.n; ++j) phase[j] = p.c0_round * grid.node(j) + p.A_per[j];
    for (int j = 0; j < grid.n; ++j) {
      if (phik[j] == 0) continue;
      const Real dB = p.B.values[j] - p.B.values[grid.wrap(fm.t_k)];
      fhat[j] = std::exp(Complex(dB, phase[grid.wrap(fm.t_k)] - phase[j])) * phik[j];
    }
    const int i = box.index_of(xi);
    out.field.set_slice(i, fhat);

    fm.compat_rel = compat_integral(p, fhat).rel();

    // arc integral over [t_xi, t_k]: the kernel cancels the forged weight, so
    // the measured value must match the integral of the negative bump
    const int d = int((fm.t_k - jx + grid.n) % grid.n);
    Complex arc(0, 0);
    for (int s = 0; s <= d; ++s) {
      const int src = grid.wrap(long(jx) + s);
      const Complex val =
          std::exp(Complex(p.B.values[grid.wrap(fm.t_k)] - p.B.values[src], phase[src] - phase[grid.wrap(fm.t_k)])) *
          fhat[src];
      arc += (s == 0 || s == d) ? Real(0.5) * val : val;
    }
    fm.arc_measured = std::abs(arc * h);
    fm.arc_target = phim.integral;
    fm.target = std::pow(fm.r, -spec.order) / 2;

    const ModeSolution u = solve_mode_resonant(p, fhat, opts.solver);
    fm.measured = u.saturated ? u.sup_norm() : std::abs(u.u[grid.wrap(fm.t_k)]);
    out.modes.push_back(fm);
  }
  if (std::none_of(out.modes.begin(), out.modes.end(), [](const ForgedMode& m) { return m.ok; }))
    throw no_witness_error("forge_beta: the symbol satisfies the window conditions at this scale");
  return out;
}

} // namespace tubesolv
