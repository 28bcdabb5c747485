#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tubesolv/conditions.hpp"
#include "tubesolv/solver.hpp"

namespace tubesolv {

struct no_witness_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Smooth compactly supported profile on a node-aligned open window: flat 1 on
// the central plateau, exponential tapers exp(1 - 1/(1-x^2)) on both sides,
// exact zeros at the window endpoints.
struct BumpSpec {
  long start_node = 0;  // lifted start (the window may wrap the seam)
  int steps = 0;        // window length in grid steps
  Real plateau_fraction = 0;
  ArrayXr samples;  // on the circle, zero off the support
  Real integral = 0;

  // plateau length in radians
  Real plateau_length(const CircleGrid& grid) const {
    return plateau_fraction * steps * grid.step();
  }
};

// Requires steps > 4 (under-resolved windows are rejected) and steps <= n.
BumpSpec bump(const CircleGrid& grid, long start_node, int steps, Real plateau_fraction);

struct ForgedMode {
  Freq xi;
  Real r = 0;
  int k = 0;  // plant scale
  bool ok = true;
  std::string note;        // reason when the mode had to be skipped
  long t_k = 0;            // lifted node index of the proof's evaluation point
  ModeBranch variant = ModeBranch::NonResonantForward;
  Complex prefactor{0, 0};
  Real prefactor_abs = 0;
  long win_start = 0;  // witness window (I+ for alpha, the [t, t_xi] window for beta)
  int win_steps = 0;
  long win2_start = 0;  // beta only: the window inside [t_xi, t]
  Real target = 0;      // provable lower bound (or exact identity value) for |u(t_k)|
  Real measured = 0;    // measured through the production solver
  Real arc_target = 0;  // beta only: integral of the negative bump
  Real arc_measured = 0;
  Real compat_rel = 0;  // beta only: measured compatibility defect
};

struct ForgedRHS {
  std::string tag;  // "dc", "alpha" or "beta"
  FourierField field;
  std::vector<ForgedMode> modes;
  Real phi_integral = 0;  // dc only: the common target integral
};

struct ForgeOptions {
  int k_min = 1;
  int k_max = 6;
  std::vector<Freq> sequence;  // defaults to 2^k e_1 clipped to the box
  Real eps_z = 1e-9;
  Real plateau_fraction = 0.55;
  // dc only: the support interval (alpha, beta) of the common bump
  Real interval_lo = 0.5;
  Real interval_hi = 1.0;
  SolverOptions solver;
};

// Right-hand sides with provable per-mode lower bounds:
//   forge_dc     planted small-divisor sequence, |u(t_k, xi_k)| equals the
//                integral of the bump for every term
//   forge_alpha  witnesses of failed forward/backward window conditions,
//                |u(t_k, xi_k)| >= |xi_k|^{-m}/4
//   forge_beta   resonant witnesses with cancelling bump pairs, arc integrals
//                >= |xi_k|^{-m}/2 while every compat integral vanishes
ForgedRHS forge_dc(const SymbolSpec& spec, const CircleGrid& grid, const FrequencyBox& box,
                   const ForgeOptions& opts = {});
ForgedRHS forge_alpha(const SymbolSpec& spec, const CircleGrid& grid, const FrequencyBox& box,
                      const ForgeOptions& opts = {});
ForgedRHS forge_beta(const SymbolSpec& spec, const CircleGrid& grid, const FrequencyBox& box,
                     const ForgeOptions& opts = {});

} // namespace tubesolv
