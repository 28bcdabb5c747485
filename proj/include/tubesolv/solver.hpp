#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "tubesolv/decay.hpp"
#include "tubesolv/field.hpp"
#include "tubesolv/log_complex.hpp"
#include "tubesolv/symbol.hpp"

namespace tubesolv {

struct SolverOptions {
  Real eps_z = 1e-9;
  Real compat_tol = 1e-10;         // relative compat threshold for membership in the closed range
  Real small_divisor_floor = 1e-6; // margins below this flag the mode as small-divisor
  Real range_guard = 16.0;         // B-oscillation handled by the global spectral route
  int threads = 0;
};

enum class ModeBranch { NonResonantForward, NonResonantBackward, Resonant };

// Spectral: integrating-factor resolvent, machine accurate, used while the
// periodic B-part oscillates less than range_guard.  Windowed: pointwise
// overflow-safe quadrature in the per-node stable direction, O(step^2)
// accurate, used beyond the guard.
enum class ModeRoute { Spectral, Windowed };

struct ModeSolution {
  Freq xi;
  Real r = 0;
  ArrayXc u;            // scaled samples: the solution is e^{log_scale} * u
  Real log_scale = 0;   // 0 unless saturated
  bool saturated = false;
  ModeBranch branch = ModeBranch::Resonant;
  ModeRoute route = ModeRoute::Spectral;
  bool small_divisor = false;
  Real amplification = 1;  // 1 / |prefactor denominator| for non-resonant modes
  Real log_sup = -std::numeric_limits<Real>::infinity();

  // clamped at the overflow guard; log_sup carries the honest magnitude
  Real sup_norm() const { return std::exp(std::min(log_sup, kOverflowGuard)); }
};

// ---------------------------------------------------------------------------
// compatibility (kernel of the transpose)
// ---------------------------------------------------------------------------

// Integral of e^{iC} fhat over the circle for a resonant mode, evaluated with
// the zero-mean periodic primitive convention and normalized by the sup of the
// weight e^{-B} so the computation never overflows:
//   integral = e^{log_scale} * normalized.
struct CompatResult {
  Complex normalized{0, 0};
  Real log_scale = 0;
  Real f_sup = 0;

  // scale-free smallness measure: |integral| / (2 pi sup|e^{iC}| sup|fhat|)
  Real rel() const { return f_sup > 0 ? std::abs(normalized) / (kTwoPi * f_sup) : 0; }
  bool saturated() const { return log_scale > kOverflowGuard; }
  Complex value() const { return std::exp(std::min(log_scale, kOverflowGuard)) * normalized; }
};

CompatResult compat_integral(const ModeProfile& profile, const ArrayXc& fhat);

struct compat_violation : std::runtime_error {
  Complex integral;
  Real rel;
  compat_violation(const std::string& msg, Complex v, Real r)
      : std::runtime_error(msg), integral(v), rel(r) {}
};

struct closure_error : std::runtime_error {
  std::vector<int> offenders;  // box indices of the violating resonant modes
  closure_error(const std::string& msg, std::vector<int> off)
      : std::runtime_error(msg), offenders(std::move(off)) {}
};

// ---------------------------------------------------------------------------
// per-mode solves
// ---------------------------------------------------------------------------

ModeSolution solve_mode_nonresonant(const ModeProfile& profile, const ArrayXc& fhat,
                                    const SolverOptions& opts = {});

// Literal evaluation of the chosen period-integral form (forward uses the
// prefactor i/(e^{2 pi i c0} - 1) with f(t+s), backward i/(1 - e^{-2 pi i c0})
// with f(t-s)); quadrature integrates the trigonometric interpolant of the
// periodic factor exactly.  Kept as a distinct numerical route for
// cross-checking the production solver.
ModeSolution solve_mode_nonresonant_form(const ModeProfile& profile, const ArrayXc& fhat,
                                         ModeBranch form, const SolverOptions& opts = {});

// Particular solution with constant zero at the maximizer t_xi (anticlockwise
// arc integration from t_xi).  Throws compat_violation when the mode fails the
// compatibility test.
ModeSolution solve_mode_resonant(const ModeProfile& profile, const ArrayXc& fhat,
                                 const SolverOptions& opts = {});

// equivalent clockwise form, exposed as a self-check; agrees with the
// anticlockwise form exactly when the compat integral vanishes
ModeSolution solve_mode_resonant_clockwise(const ModeProfile& profile, const ArrayXc& fhat,
                                           const SolverOptions& opts = {});

// ---------------------------------------------------------------------------
// global solve
// ---------------------------------------------------------------------------

struct ClosureResult {
  bool member = true;
  int worst_index = -1;
  Real worst_rel = 0;
  std::vector<int> offenders;
};

ClosureResult closure_membership(const FourierField& f, const std::vector<ModeProfile>& profiles,
                                 const SolverOptions& opts = {});

struct SolveDiagnostics {
  Real residual_sup = 0;   // sup over (t, xi) of |P u - f|, non-saturated modes
  Real residual_rel = 0;   // residual_sup / sup |f|
  Real f_sup = 0;
  std::vector<int> saturated_modes;
  std::vector<int> windowed_modes;
  std::vector<int> small_divisor_modes;
  DecayFit u_decay0, u_decay1, f_decay;
};

struct GlobalSolution {
  std::vector<ModeSolution> modes;  // aligned with the box enumeration
  FourierField u;                   // saturated modes materialize as zero columns
  SolveDiagnostics diag;
};

// Per-mode dispatch over the box.  Throws closure_error when some resonant
// mode fails the compatibility test.
GlobalSolution solve_global(const FourierField& f, const std::vector<ModeProfile>& profiles,
                            const SolverOptions& opts = {});

// P u per mode: spectral D_t plus pointwise multiplication by c(t, xi)
FourierField apply_P(const FourierField& u, const std::vector<ModeProfile>& profiles);

} // namespace tubesolv
