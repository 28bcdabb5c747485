#include "tubesolv/homogeneous.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tubesolv/parallel.hpp"

namespace tubesolv {

SignChange sign_change(const ArrayXr& b, Real tol) {
  SignChange sc;
  sc.min_b = b.minCoeff();
  sc.max_b = b.maxCoeff();
  const Real scale = b.abs().maxCoeff();
  if (scale == 0) {
    sc.degenerate = true;
    return sc;
  }
  sc.changes = sc.min_b < -tol * scale && sc.max_b > tol * scale;
  return sc;
}

SignChange sign_change(const ModeProfile& profile, Real tol) { return sign_change(profile.b, tol); }

int sublevel_components(const ArrayXr& B, Real lambda) {
  const int n = int(B.size());
  int below = 0;
  for (int j = 0; j < n; ++j) below += B[j] < lambda;
  if (below == 0) return 0;
  if (below == n) return 1;  // the whole circle is one run
  int runs = 0;
  for (int j = 0; j < n; ++j) {
    const bool cur = B[j] < lambda;
    const bool prev = B[(j + n - 1) % n] < lambda;
    runs += cur && !prev;  // a run wrapping the seam starts exactly once
  }
  return runs;
}

namespace {

SublevelScan sublevel_scan(const ArrayXr& B) {
  SublevelScan scan;
  std::vector<Real> values(B.data(), B.data() + B.size());
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  // component counts only change when lambda crosses a sample value, so the
  // midpoint sweep is exhaustive for grid data
  for (size_t i = 0; i + 1 < values.size(); ++i) {
    const Real lambda = Real(0.5) * (values[i] + values[i + 1]);
    const int count = sublevel_components(B, lambda);
    scan.component_counts.push_back({lambda, count});
    scan.max_components = std::max(scan.max_components, count);
  }
  scan.connected_all = scan.max_components <= 1;
  return scan;
}

} // namespace

SublevelScan connected_all(const ModeProfile& profile) {
  if (!profile.resonant) throw std::domain_error("connected_all: profile is not resonant");
  SublevelScan scan = sublevel_scan(profile.B.values);
  scan.xi = profile.xi;
  return scan;
}

int plateau_local_max_count(const ArrayXr& B) {
  // merge consecutive equal samples (cyclically), then count strict maxima
  std::vector<Real> v;
  for (int j = 0; j < B.size(); ++j)
    if (v.empty() || v.back() != B[j]) v.push_back(B[j]);
  while (v.size() > 1 && v.front() == v.back()) v.pop_back();
  const int m = int(v.size());
  if (m < 2) return 0;
  int count = 0;
  for (int i = 0; i < m; ++i) {
    const Real prev = v[(i + m - 1) % m], next = v[(i + 1) % m];
    count += v[i] > prev && v[i] > next;
  }
  return count;
}

CorollaryReport corollary_verdict(const SymbolSpec& spec, const CircleGrid& grid,
                                  const FrequencyBox& box, const CorollaryOptions& opts) {
  if (!spec.is_homogeneous())
    throw std::invalid_argument("corollary_verdict: symbol is not positively homogeneous");
  if (!(spec.order > 0))
    throw std::invalid_argument("corollary_verdict: homogeneous characterization needs order m > 0");

  CorollaryReport rep;

  // primitive directions present in the box
  std::vector<int> prim;
  for (int i = 0; i < box.size(); ++i)
    if (freq_gcd(box[i]) == 1) prim.push_back(i);

  std::vector<RayReport> rays(prim.size());
  std::vector<std::vector<DioMargin>> ray_margins(prim.size());
  parallel_for(
      int(prim.size()),
      [&](int k) {
        const Freq& xihat = box[prim[k]];
        const ModeProfile base = evaluate_mode(spec, grid, xihat, {opts.eps_z});
        RayReport& ray = rays[k];
        ray.xihat = xihat;
        const Real rhat = FrequencyBox::norm_of(xihat);
        const Complex c0hat(base.a0, base.b0);
        for (int nmul = 1; nmul * rhat <= box.K + 1e-12; ++nmul) {
          const Complex c0 = std::pow(Real(nmul), spec.order) * c0hat;
          DioMargin dm = dio_margin_c0(xihat * nmul, c0, opts.eps_z);
          if (dm.resonant) ray.need_connected = true;
          else ray.need_no_sign_change = true;
          ray_margins[k].push_back(dm);
        }
        // sign pattern and sublevel topology are inherited by every multiple
        ray.sc = sign_change(base, opts.sign_tol);
        ray.scan = sublevel_scan(base.B.values);
        ray.scan.xi = xihat;
        ray.ok = true;
        if (ray.need_no_sign_change && ray.sc.changes) {
          ray.ok = false;
          ray.reason = "sign change of b along non-resonant multiples of " + freq_to_string(xihat);
        } else if (ray.need_connected && !ray.scan.connected_all) {
          ray.ok = false;
          ray.reason = "sublevel disconnected at primitive " + freq_to_string(xihat);
        }
      },
      opts.threads);
  rep.rays = std::move(rays);

  std::vector<DioMargin> margins;
  for (auto& rm : ray_margins) margins.insert(margins.end(), rm.begin(), rm.end());
  rep.dio = dio_fit(margins, opts.dio);
  rep.dc_ok = rep.dio.vacuous || rep.dio.offenders.empty();
  if (!rep.dc_ok) rep.reasons.push_back("diophantine envelope violated");

  rep.solvable = rep.dc_ok;
  for (const auto& ray : rep.rays)
    if (!ray.ok) {
      rep.solvable = false;
      rep.reasons.push_back(ray.reason);
    }
  return rep;
}

PerturbedReport perturbed_principal_check(const SymbolSpec& spec, const CircleGrid& grid,
                                          const FrequencyBox& box, Real sign_tol) {
  const auto* hl = std::get_if<HomogeneousPlusLowerSymbol>(&spec.variant);
  if (!hl)
    throw std::invalid_argument("perturbed_principal_check: symbol has no homogeneous-plus-lower split");
  if (!(hl->lower_order < spec.order))
    throw std::invalid_argument("perturbed_principal_check: remainder order must be below the principal order");

  PerturbedReport rep;
  SymbolSpec principal;
  principal.order = spec.order;
  principal.variant = hl->principal;

  for (int i = 0; i < box.size(); ++i) {
    if (freq_gcd(box[i]) != 1) continue;
    const ArrayXc cm = symbol_samples(principal, grid, box[i]);
    const ArrayXr bm = cm.imag();
    const Real bm0 = bm.mean();
    const Real scale = bm.abs().maxCoeff();
    const SignChange sc = sign_change(bm, sign_tol);
    if (std::abs(bm0) > 1e-9 * (1 + scale) && sc.changes) {
      rep.verdict = PerturbedVerdict::NotSolvable;
      rep.witness = box[i];
      rep.reason = "principal mean nonzero and principal sign change at " + freq_to_string(box[i]);
      return rep;
    }
  }
  rep.verdict = PerturbedVerdict::Inconclusive;
  rep.reason = "hypotheses not met; fall back to the general conditions route";
  return rep;
}

} // namespace tubesolv
