#pragma once

#include <map>
#include <string>
#include <vector>

#include "tubesolv/conditions.hpp"
#include "tubesolv/symbol.hpp"

namespace tubesolv {

// Characterization machinery for positively homogeneous symbols: sign changes
// of b on non-resonant rays, sublevel connectedness of the B-primitive on
// resonant rays, and the combined verdict cross-validating the general route.

struct SignChange {
  bool changes = false;
  bool degenerate = false;  // b identically zero at the working tolerance
  Real min_b = 0, max_b = 0;
};

// true iff min b < -tol*max|b| and max b > +tol*max|b|
SignChange sign_change(const ArrayXr& b, Real tol = 1e-6);
SignChange sign_change(const ModeProfile& profile, Real tol = 1e-6);

// number of maximal cyclic runs of grid nodes with B < lambda
int sublevel_components(const ArrayXr& B, Real lambda);

struct SublevelScan {
  Freq xi;
  std::vector<std::pair<Real, int>> component_counts;  // lambda -> component count
  int max_components = 0;
  bool connected_all = true;
};

// sweeps lambda over midpoints of the sorted distinct sample values of B
SublevelScan connected_all(const ModeProfile& profile);

// Structural oracle for the sweep: number of strict cyclic local maxima of B
// after merging plateaus of equal consecutive samples.  Sublevels are all
// connected iff this count is <= 1.
int plateau_local_max_count(const ArrayXr& B);

struct RayReport {
  Freq xihat;             // primitive direction
  bool need_no_sign_change = false;  // some multiple in the box is non-resonant
  bool need_connected = false;       // some multiple in the box is resonant
  SignChange sc;
  SublevelScan scan;
  bool ok = true;
  std::string reason;
};

struct CorollaryOptions {
  Real eps_z = 1e-9;
  Real sign_tol = 1e-6;
  DioFitOptions dio;
  int threads = 0;
};

struct CorollaryReport {
  bool solvable = false;
  bool dc_ok = false;
  DioFit dio;
  std::vector<RayReport> rays;
  std::vector<std::string> reasons;
};

// Verdict for a positively homogeneous symbol of order m > 0 at cutoff.
// Scans run once per primitive direction; profiles at the multiples n*xihat
// are positive multiples of the base profile, so sign patterns and sublevel
// topology are inherited along each ray.
CorollaryReport corollary_verdict(const SymbolSpec& spec, const CircleGrid& grid,
                                  const FrequencyBox& box, const CorollaryOptions& opts = {});

enum class PerturbedVerdict { NotSolvable, Inconclusive };

struct PerturbedReport {
  PerturbedVerdict verdict = PerturbedVerdict::Inconclusive;
  Freq witness;  // primitive direction triggering non-solvability, if any
  std::string reason;
};

// Principal-part criterion for homogeneous-plus-lower-order symbols: flags
// non-solvability when some primitive direction has a nonzero principal mean
// together with a principal sign change; otherwise defers to the general
// conditions route.
PerturbedReport perturbed_principal_check(const SymbolSpec& spec, const CircleGrid& grid,
                                          const FrequencyBox& box, Real sign_tol = 1e-6);

} // namespace tubesolv
