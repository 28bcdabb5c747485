#include "tubesolv/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include "tubesolv/log_complex.hpp"

namespace tubesolv {

namespace {
constexpr Real kInf = std::numeric_limits<Real>::infinity();
}

// ---------------------------------------------------------------------------
// margins
// ---------------------------------------------------------------------------

DioMargin dio_margin_c0(const Freq& xi, Complex c0, Real eps_z) {
  DioMargin m;
  m.xi = xi;
  m.r = FrequencyBox::norm_of(xi);
  m.a0 = c0.real();
  m.b0 = c0.imag();
  m.resonant = resonance_test(m.a0, m.b0, eps_z);
  const Real dist = m.a0 - std::round(m.a0);  // tau = -round(a0) is the minimizer
  m.margin = std::hypot(dist, m.b0);
  // evaluated against the nearest integer so tiny margins keep full precision;
  // huge |b0| saturates the exponential margins at the largest finite double
  const Complex w(dist, m.b0);
  auto clamp = [](Real v) { return std::isfinite(v) ? v : std::numeric_limits<Real>::max(); };
  m.exp_margin1 = clamp(std::abs(cexpm1(Complex(0, -kTwoPi) * w)));
  m.exp_margin2 = clamp(std::abs(cexpm1(Complex(0, kTwoPi) * w)));
  return m;
}

DioMargin dio_margin(const ModeProfile& p) {
  DioMargin m = dio_margin_c0(p.xi, Complex(p.a0, p.b0));
  m.resonant = p.resonant;  // classification fixed by the profile's tolerance
  return m;
}

namespace {

struct LineFit {
  Real slope = 0, intercept = 0;
  int bins_used = 0;
};

// least-squares line through per-bin lower quantiles of (x, y)
LineFit envelope_fit(const std::vector<Real>& x, const std::vector<Real>& y, int bins, Real q) {
  LineFit lf;
  const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
  const Real lo = *mn, hi = *mx;
  if (!(hi > lo)) {
    std::vector<Real> ys = y;
    std::sort(ys.begin(), ys.end());
    lf.intercept = ys[size_t(q * (ys.size() - 1))];
    lf.bins_used = 1;
    return lf;
  }
  bins = std::max(2, std::min<int>(bins, int(x.size())));
  std::vector<std::vector<std::pair<Real, Real>>> by_bin(bins);
  for (size_t i = 0; i < x.size(); ++i) {
    int bidx = int((x[i] - lo) / (hi - lo) * bins);
    bidx = std::min(bidx, bins - 1);
    by_bin[bidx].push_back({x[i], y[i]});
  }
  std::vector<Real> bx, by;
  for (auto& bin : by_bin) {
    if (bin.empty()) continue;
    std::sort(bin.begin(), bin.end(), [](auto& a, auto& b) { return a.second < b.second; });
    // lower quantile, but never the bare minimum: a sparse planted sequence
    // puts at most one bad frequency in a bin and must not drag the envelope
    const size_t pick = bin.size() == 1
                            ? 0
                            : std::min(bin.size() - 1, std::max<size_t>(1, size_t(q * bin.size())));
    Real xm = 0;
    for (auto& p : bin) xm += p.first;
    bx.push_back(xm / bin.size());
    by.push_back(bin[pick].second);
  }
  lf.bins_used = int(bx.size());
  if (lf.bins_used < 2) {
    lf.intercept = by.empty() ? 0 : by[0];
    return lf;
  }
  Real sx = 0, sy = 0, sxx = 0, sxy = 0;
  const Real n = Real(bx.size());
  for (size_t i = 0; i < bx.size(); ++i) {
    sx += bx[i];
    sy += by[i];
    sxx += bx[i] * bx[i];
    sxy += bx[i] * by[i];
  }
  const Real det = n * sxx - sx * sx;
  lf.slope = (n * sxy - sx * sy) / det;
  lf.intercept = (sy - lf.slope * sx) / n;
  return lf;
}

Real safe_log(Real v) { return std::log(std::max(v, Real(1e-300))); }

} // namespace

DioFit dio_fit(const std::vector<DioMargin>& margins, const DioFitOptions& opts) {
  DioFit fit;
  std::vector<int> idx;
  for (int i = 0; i < int(margins.size()); ++i)
    if (!margins[i].resonant && margins[i].r >= opts.d_floor) idx.push_back(i);
  int nonresonant = 0;
  for (const auto& m : margins) nonresonant += !m.resonant;
  if (nonresonant == 0) {
    fit.vacuous = true;  // (DC) quantifies over xi outside the resonant set
    return fit;
  }
  if (int(idx.size()) < 8)
    throw std::invalid_argument("dio_fit: needs at least 8 non-resonant frequencies above the floor, got " +
                                std::to_string(idx.size()));
  fit.points = int(idx.size());

  std::vector<Real> x(idx.size()), y(idx.size()), y1(idx.size()), y2(idx.size());
  for (size_t k = 0; k < idx.size(); ++k) {
    const auto& m = margins[idx[k]];
    x[k] = std::log1p(m.r);
    y[k] = safe_log(m.margin);
    y1[k] = safe_log(m.exp_margin1);
    y2[k] = safe_log(m.exp_margin2);
  }
  const LineFit lf = envelope_fit(x, y, opts.bins, opts.quantile);
  fit.Mhat = std::max(Real(0), -lf.slope);
  fit.Chat = std::exp(lf.intercept);
  fit.exp1_Mhat = std::max(Real(0), -envelope_fit(x, y1, opts.bins, opts.quantile).slope);
  fit.exp2_Mhat = std::max(Real(0), -envelope_fit(x, y2, opts.bins, opts.quantile).slope);
  fit.lemma_consistent = std::abs(fit.exp1_Mhat - fit.Mhat) <= 1 + 1e-9 &&
                         std::abs(fit.exp2_Mhat - fit.Mhat) <= 1 + 1e-9;

  const Real cut = std::log(opts.offender_factor);
  for (size_t k = 0; k < idx.size(); ++k) {
    const Real below = (lf.intercept + lf.slope * x[k]) - y[k];  // decades below the envelope
    if (below > cut) {
      fit.offenders.push_back(idx[k]);
      if (below > fit.worst_ratio) {
        fit.worst_ratio = below;
        fit.worst_offender = idx[k];
      }
    }
  }
  if (fit.worst_offender >= 0) fit.worst_ratio = std::exp(fit.worst_ratio);
  return fit;
}

// ---------------------------------------------------------------------------
// window machinery
// ---------------------------------------------------------------------------

int required_nt(Real K, Real m) {
  const Real need = 8 * (kTwoPi / 2) * std::pow(K, std::max(m, Real(0)));
  long n = std::lround(std::ceil(need));
  if (n < 8) n = 8;
  if (n % 2) ++n;
  return int(n);
}

int window_steps(const CircleGrid& grid, Real r, Real m) {
  const Real delta = std::pow(r, -m);
  if (grid.step() > delta / 4) {
    const int need = required_nt(r, m);
    throw resolution_error("window of length |xi|^{-m} = " + std::to_string(delta) +
                               " under-resolved at n_t = " + std::to_string(grid.n) +
                               "; need n_t >= " + std::to_string(need),
                           need);
  }
  return int(std::ceil(delta / grid.step() - 1e-12));
}

namespace {

// sliding max of values over index windows [j, j+w], reported at each start j
ArrayXr sliding_window_max(const ArrayXr& values, int w, int starts) {
  ArrayXr out(starts);
  std::deque<int> dq;
  for (int j = 0; j < int(values.size()); ++j) {
    while (!dq.empty() && values[dq.back()] <= values[j]) dq.pop_back();
    dq.push_back(j);
    const int start = j - w;
    if (start >= 0) {
      while (dq.front() < start) dq.pop_front();
      if (start < starts) out[start] = values[dq.front()];
    }
  }
  return out;
}

ArrayXr sliding_window_min(const ArrayXr& values, int w, int starts) {
  return -sliding_window_max(-values, w, starts);
}

bool alpha_vacuous(Real r, Real m) {
  // m < 0: the negative-order shortcut (windows exceed the period for all but
  // finitely many xi, and the total oscillation is below any log scale)
  return m < 0 || std::pow(r, -m) >= kTwoPi;
}

struct AlphaGaps {
  ArrayXr gap;  // per circle node
  int w = 0;
  bool vacuous = false;
};

// gap[j] = B(t_j) - min over admissible window positions of the window sup,
// windows ahead (sign=+1) or behind (sign=-1) of t_j
AlphaGaps alpha_gaps(const ModeProfile& p, int sign, Real m) {
  if (p.r < 2) throw std::invalid_argument("alpha_star: requires |xi| >= 2");
  AlphaGaps g;
  const int n = p.grid.n;
  if (alpha_vacuous(p.r, m)) {
    g.vacuous = true;
    g.gap = ArrayXr::Constant(n, -kInf);
    return g;
  }
  const int w = window_steps(p.grid, p.r, m);
  g.w = w;
  ArrayXr lift(2 * n + w + 1);
  for (int j = 0; j < lift.size(); ++j) lift[j] = p.B.lifted(j);
  const ArrayXr W = sliding_window_max(lift, w, 2 * n);       // window sup at each start
  const ArrayXr SM = sliding_window_min(W, n - w, n);         // min over starts in [p, p+n-w]
  g.gap.resize(n);
  for (int j = 0; j < n; ++j)
    g.gap[j] = sign > 0 ? lift[j] - SM[j] : lift[j + n] - SM[j];
  return g;
}

struct BetaGaps {
  ArrayXr gap_a, gap_b;  // arcs [t, t_xi] and [t_xi, t]; -inf when no window fits
  int w = 0;
  bool vacuous = false;
};

BetaGaps beta_gaps(const ModeProfile& p, Real m) {
  if (!p.resonant) throw std::domain_error("beta_star: profile is not resonant");
  if (p.r < 2) throw std::invalid_argument("beta_star: requires |xi| >= 2");
  BetaGaps g;
  const int n = p.grid.n;
  g.gap_a = ArrayXr::Constant(n, -kInf);
  g.gap_b = ArrayXr::Constant(n, -kInf);
  if (alpha_vacuous(p.r, m)) {
    g.vacuous = true;
    return g;
  }
  const int w = window_steps(p.grid, p.r, m);
  g.w = w;
  const int jx = p.t_xi_index;
  // resonant: B is numerically periodic (|b0| <= eps_z); the ramp is dropped
  ArrayXr wrapped(n + w + 1);
  for (int j = 0; j < wrapped.size(); ++j) wrapped[j] = p.B.values[p.grid.wrap(j)];
  const ArrayXr Wc = sliding_window_max(wrapped, w, n);  // cyclic window sup per start

  // running minima of window sups approaching t_xi from behind / leaving it ahead
  ArrayXr RA = ArrayXr::Constant(n, kInf);  // RA[d]: windows in the arc ending at t_xi, arc length d
  Real run = kInf;
  for (int d = w; d < n; ++d) {
    run = std::min(run, Wc[p.grid.wrap(long(jx) - d)]);
    RA[d] = run;
  }
  ArrayXr RB = ArrayXr::Constant(n, kInf);  // RB[d']: windows in the arc starting at t_xi, length d'
  run = kInf;
  for (int d2 = w; d2 < n; ++d2) {
    run = std::min(run, Wc[p.grid.wrap(long(jx) + d2 - w)]);
    RB[d2] = run;
  }
  for (int j = 0; j < n; ++j) {
    if (j == jx) continue;
    const int d = int((long(jx) - j + n) % n);
    const int d2 = n - d;
    if (RA[d] < kInf) g.gap_a[j] = p.B.values[j] - RA[d];
    if (RB[d2] < kInf) g.gap_b[j] = p.B.values[j] - RB[d2];
  }
  return g;
}

} // namespace

Real alpha_star(const ModeProfile& p, int sign, Real m) {
  const AlphaGaps g = alpha_gaps(p, sign, m);
  if (g.vacuous) return 0;
  const Real worst = g.gap.maxCoeff();
  return std::max(Real(0), worst) / std::log(p.r);
}

Real beta_star(const ModeProfile& p, Real m) {
  const BetaGaps g = beta_gaps(p, m);
  if (g.vacuous) return 0;
  Real worst = 0;
  for (int j = 0; j < p.grid.n; ++j) {
    if (j == p.t_xi_index) continue;
    worst = std::max(worst, std::min(std::max(Real(0), g.gap_a[j]), std::max(Real(0), g.gap_b[j])));
  }
  return worst / std::log(p.r);
}

bool alpha_holds(const ModeProfile& p, int sign, Real m, Real D) {
  const AlphaGaps g = alpha_gaps(p, sign, m);
  if (g.vacuous) return true;
  return g.gap.maxCoeff() <= D * std::log(p.r);
}

bool beta_holds(const ModeProfile& p, Real m, Real D) {
  const BetaGaps g = beta_gaps(p, m);
  if (g.vacuous) return true;
  const Real bound = D * std::log(p.r);
  for (int j = 0; j < p.grid.n; ++j) {
    if (j == p.t_xi_index) continue;
    if (std::min(g.gap_a[j], g.gap_b[j]) > bound) return false;
  }
  return true;
}

std::optional<AlphaWitness> alpha_violation_witness(const ModeProfile& p, int sign, Real m,
                                                    Real scale) {
  const AlphaGaps g = alpha_gaps(p, sign, m);
  if (g.vacuous) return std::nullopt;
  const Real logr = std::log(p.r);
  int best = 0;
  for (int j = 1; j < p.grid.n; ++j)
    if (g.gap[j] > g.gap[best]) best = j;
  if (!(g.gap[best] > scale * logr)) return std::nullopt;

  AlphaWitness wt;
  wt.sign = sign;
  wt.D = std::max(Real(0), g.gap[best]) / logr;
  wt.gap = g.gap[best];
  wt.win_steps = g.w;
  wt.t_index = sign > 0 ? best : best + p.grid.n;
  // locate the worst window for that node
  const int n = p.grid.n;
  ArrayXr lift(2 * n + g.w + 1);
  for (int j = 0; j < lift.size(); ++j) lift[j] = p.B.lifted(j);
  const long lo = wt.t_index, hi = wt.t_index + n - g.w;
  long arg = lo;
  Real minsup = kInf;
  for (long tau = lo; tau <= hi; ++tau) {
    Real sup = -kInf;
    for (long s = tau; s <= tau + g.w; ++s) sup = std::max(sup, lift[s]);
    if (sup < minsup) {
      minsup = sup;
      arg = tau;
    }
  }
  wt.win_start = sign > 0 ? arg : arg - n;  // behind-windows live in [t - 2 pi, t]
  return wt;
}

std::optional<BetaWitness> beta_violation_witness(const ModeProfile& p, Real m, Real scale) {
  const BetaGaps g = beta_gaps(p, m);
  if (g.vacuous) return std::nullopt;
  const Real logr = std::log(p.r);
  const int n = p.grid.n;
  int best = -1;
  Real best_gap = scale * logr;
  for (int j = 0; j < n; ++j) {
    if (j == p.t_xi_index) continue;
    const Real mg = std::min(g.gap_a[j], g.gap_b[j]);
    if (mg > best_gap) {
      best_gap = mg;
      best = j;
    }
  }
  if (best < 0) return std::nullopt;

  BetaWitness wt;
  wt.t_index = best;
  wt.gap_plus = g.gap_a[best];
  wt.gap_minus = g.gap_b[best];
  wt.D = beta_star(p, m);
  wt.win_steps = g.w;
  const int jx = p.t_xi_index;
  const int d = int((long(jx) - best + n) % n);
  const int d2 = n - d;
  auto window_sup = [&](long start) {
    Real sup = -kInf;
    for (int s = 0; s <= g.w; ++s) sup = std::max(sup, p.B.values[p.grid.wrap(start + s)]);
    return sup;
  };
  // worst window inside [t, t_xi]
  Real minsup = kInf;
  for (int e = g.w; e <= d; ++e) {
    const Real sup = window_sup(long(jx) - e);
    if (sup < minsup) {
      minsup = sup;
      wt.win_plus_start = p.grid.wrap(long(jx) - e);
    }
  }
  // worst window inside [t_xi, t]
  minsup = kInf;
  for (int g2 = 0; g2 + g.w <= d2; ++g2) {
    const Real sup = window_sup(long(jx) + g2);
    if (sup < minsup) {
      minsup = sup;
      wt.win_minus_start = p.grid.wrap(long(jx) + g2);
    }
  }
  return wt;
}

OscillationConstants oscillation_constants(const ModeProfile& p, Real m) {
  OscillationConstants oc;
  oc.xi = p.xi;
  oc.r = p.r;
  oc.resonant = p.resonant;
  if (p.r < 2) return oc;  // log|xi| degenerate below the floor
  oc.vacuous = alpha_vacuous(p.r, m);
  oc.Dplus = alpha_star(p, +1, m);
  oc.Dminus = alpha_star(p, -1, m);
  if (p.resonant) oc.Dbeta = beta_star(p, m);
  return oc;
}

// ---------------------------------------------------------------------------
// verdict
// ---------------------------------------------------------------------------

Verdict aggregate(const std::vector<DioMargin>& margins,
                  const std::vector<OscillationConstants>& constants, Real K,
                  const AggregateOptions& opts) {
  Verdict v;
  v.K = K;
  v.dio = dio_fit(margins, opts.dio);
  v.dc_ok = v.dio.vacuous || v.dio.offenders.empty();
  if (!v.dc_ok)
    v.reasons.push_back("diophantine envelope violated at " +
                        std::to_string(v.dio.offenders.size()) + " frequencies, worst " +
                        freq_to_string(margins[v.dio.worst_offender].xi));

  // condition 2a asks for (alpha)+ OR (alpha)-, hence the min of the pair
  std::vector<int> order;
  for (int i = 0; i < int(constants.size()); ++i) {
    const auto& oc = constants[i];
    if (oc.r < opts.d_floor) continue;
    if (oc.resonant ? !oc.Dbeta.has_value() : !(oc.Dplus && oc.Dminus)) continue;
    order.push_back(i);
  }
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return constants[a].r < constants[b].r; });

  std::vector<Real> xs, run_max;
  Real running = 0;
  for (int i : order) {
    const auto& oc = constants[i];
    const Real D = oc.resonant ? *oc.Dbeta : std::min(*oc.Dplus, *oc.Dminus);
    if (D > v.supD) {
      v.supD = D;
      v.supD_index = i;
    }
    running = std::max(running, D);
    xs.push_back(std::log1p(oc.r));
    run_max.push_back(running);
  }
  if (xs.size() >= 2) {
    Real sx = 0, sy = 0, sxx = 0, sxy = 0;
    const Real n = Real(xs.size());
    for (size_t k = 0; k < xs.size(); ++k) {
      sx += xs[k];
      sy += run_max[k];
      sxx += xs[k] * xs[k];
      sxy += xs[k] * run_max[k];
    }
    const Real det = n * sxx - sx * sx;
    v.envelope_slope = det > 0 ? (n * sxy - sx * sy) / det : 0;
  }
  v.osc_bounded = v.envelope_slope <= opts.bounded_slope_tol;
  if (!v.osc_bounded)
    v.reasons.push_back("oscillation constants grow with |xi| (envelope slope " +
                        std::to_string(v.envelope_slope) + ")");
  v.solvable_at_cutoff = v.dc_ok && v.osc_bounded;
  return v;
}

} // namespace tubesolv
