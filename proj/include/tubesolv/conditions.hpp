#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tubesolv/symbol.hpp"

namespace tubesolv {

// Raised when the grid is too coarse to resolve the |xi|^{-m} windows.
struct resolution_error : std::runtime_error {
  int required_nt;
  resolution_error(const std::string& msg, int nt) : std::runtime_error(msg), required_nt(nt) {}
};

// ---------------------------------------------------------------------------
// small-divisor margins
// ---------------------------------------------------------------------------

struct DioMargin {
  Freq xi;
  Real r = 0;
  bool resonant = false;
  Real a0 = 0, b0 = 0;
  Real margin = 0;       // min over integers tau of |tau + c0(xi)|
  Real exp_margin1 = 0;  // |1 - e^{-2 pi i c0}|
  Real exp_margin2 = 0;  // |e^{2 pi i c0} - 1|
};

DioMargin dio_margin(const ModeProfile& profile);
DioMargin dio_margin_c0(const Freq& xi, Complex c0, Real eps_z = 1e-9);

// Lower-envelope fit of log margin against log(1+|xi|).  The envelope is a
// least-squares line through per-bin lower quantiles (robust against a sparse
// planted sequence of bad frequencies), and offenders are the points lying
// more than offender_factor below it.  The same fit applied to the two
// exponential margins must give exponents within +-1 (the margin-equivalence
// consistency check).
struct DioFitOptions {
  int bins = 12;
  Real quantile = 0.05;
  Real offender_factor = 1e3;
  Real d_floor = 2.0;  // frequencies with |xi| < d_floor are left out of the fit
};

struct DioFit {
  Real Chat = 0;
  Real Mhat = 0;
  Real exp1_Mhat = 0, exp2_Mhat = 0;
  bool lemma_consistent = true;
  bool vacuous = false;  // every frequency resonant: the condition quantifies over nothing
  int points = 0;
  std::vector<int> offenders;  // indices into the input margin table
  int worst_offender = -1;
  Real worst_ratio = 1;  // margin / envelope at the worst offender
};

DioFit dio_fit(const std::vector<DioMargin>& margins, const DioFitOptions& opts = {});

// ---------------------------------------------------------------------------
// window oscillation constants
// ---------------------------------------------------------------------------

// Window length |xi|^{-m} in whole grid steps, rounded up (larger windows make
// the conditions easier, so rounding up can only underestimate the constants).
// Throws resolution_error unless step <= |xi|^{-m}/4.
int window_steps(const CircleGrid& grid, Real r, Real m);

// even n_t satisfying the resolution rule step <= K^{-m}/4 for the whole box
int required_nt(Real K, Real m);

// Minimal D such that every admissible window ahead of (sign=+1) or behind
// (sign=-1) each node contains a point where B has dropped by at most
// D log|xi|.  Precondition: |xi| >= 2.  Windows vacuous (D = 0) when
// |xi|^{-m} >= 2*pi or when m < 0.
Real alpha_star(const ModeProfile& profile, int sign, Real m);

// Resonant analogue with windows confined to one of the two arcs joining each
// node to the maximizer t_xi.  Precondition: resonant profile, |xi| >= 2.
Real beta_star(const ModeProfile& profile, Real m);

// direct re-checks of the raw predicates at a given D (threshold tests)
bool alpha_holds(const ModeProfile& profile, int sign, Real m, Real D);
bool beta_holds(const ModeProfile& profile, Real m, Real D);

// Witnesses of failure at scale k: a node and window(s) with
// B(t) - B(s) > k log|xi| for every s in the window.  Node and window starts
// are lifted indices (alpha: [0, 2n); window starts may wrap).
struct AlphaWitness {
  int sign = +1;
  Real D = 0;          // measured minimal constant
  long t_index = 0;    // lifted node index of t
  long win_start = 0;  // lifted start node of the violating window
  int win_steps = 0;
  Real gap = 0;  // B(t) - max over the window
};
std::optional<AlphaWitness> alpha_violation_witness(const ModeProfile& profile, int sign, Real m,
                                                    Real scale);

struct BetaWitness {
  Real D = 0;
  int t_index = 0;
  long win_plus_start = 0;   // window inside the arc [t, t_xi]
  long win_minus_start = 0;  // window inside the arc [t_xi, t]
  int win_steps = 0;
  Real gap_plus = 0, gap_minus = 0;
};
std::optional<BetaWitness> beta_violation_witness(const ModeProfile& profile, Real m, Real scale);

struct OscillationConstants {
  Freq xi;
  Real r = 0;
  bool resonant = false;
  bool vacuous = false;
  std::optional<Real> Dplus, Dminus;  // absent below |xi| = 2
  std::optional<Real> Dbeta;          // present iff resonant and |xi| >= 2
};

OscillationConstants oscillation_constants(const ModeProfile& profile, Real m);

// ---------------------------------------------------------------------------
// verdict at cutoff
// ---------------------------------------------------------------------------

struct AggregateOptions {
  Real d_floor = 2.0;
  Real bounded_slope_tol = 0.05;  // envelope slope below which the D sequence counts as bounded
  DioFitOptions dio;
};

struct Verdict {
  Real K = 0;
  DioFit dio;
  Real supD = 0;
  int supD_index = -1;  // index into the constants table, -1 when empty
  Real envelope_slope = 0;
  bool dc_ok = false;
  bool osc_bounded = false;
  bool solvable_at_cutoff = false;
  std::vector<std::string> reasons;
};

Verdict aggregate(const std::vector<DioMargin>& margins,
                  const std::vector<OscillationConstants>& constants, Real K,
                  const AggregateOptions& opts = {});

} // namespace tubesolv
