#pragma once

#include <array>
#include <optional>
#include <variant>
#include <vector>

#include "tubesolv/expression.hpp"
#include "tubesolv/field.hpp"
#include "tubesolv/fourier.hpp"

namespace tubesolv {

// Tube-type discrete symbols c(t, xi) = a + i b of declared order m.
//
// Structural variants:
//   Constant          c(t, xi) = lambda(xi), radial expressions for Re/Im
//   Separable         c(t, xi) = (a(t) + i b(t)) * q(|xi|)
//   Homogeneous       c(t, n*xihat) = n^m * c(t, xihat) exactly, with base
//                     values c(t, xihat) = |xihat|^m (a(t) + i b(t)) stored on
//                     primitive lattice directions (gcd of components = 1)
//   HomogeneousPlusLower   homogeneous principal part plus a separable
//                          remainder of strictly lower order
//   Tabulated         arbitrary samples c(t_j, xi) on a declared grid/box

struct ConstantSymbol {
  Expr re, im;  // radial expressions in r = |xi|
};

struct SeparableSymbol {
  Expr a, b;  // time profiles
  Expr q;     // radial factor
};

struct HomogeneousSymbol {
  Expr a, b;  // base time profiles on primitive directions
};

struct HomogeneousPlusLowerSymbol {
  HomogeneousSymbol principal;
  Real lower_order = 0;
  SeparableSymbol lower;
};

struct TabulatedSymbol {
  FourierField samples;  // c(t_j, xi)
};

struct SymbolSpec {
  Real order = 0;
  std::variant<ConstantSymbol, SeparableSymbol, HomogeneousSymbol, HomogeneousPlusLowerSymbol,
               TabulatedSymbol>
      variant;

  bool is_homogeneous() const { return std::holds_alternative<HomogeneousSymbol>(variant); }
  bool is_homogeneous_plus_lower() const {
    return std::holds_alternative<HomogeneousPlusLowerSymbol>(variant);
  }
};

// greatest common divisor of |components|, 0 for xi = 0
int freq_gcd(const Freq& xi);

// samples of c(t_j, xi) on the grid; Tabulated rejects grid/box mismatches
ArrayXc symbol_samples(const SymbolSpec& spec, const CircleGrid& grid, const Freq& xi);

// average c0(xi) = a0 + i b0 (mean of the samples)
Complex symbol_c0(const SymbolSpec& spec, const CircleGrid& grid, const Freq& xi);

// Per-frequency cache: samples of a and b, averages, basepoint primitives with
// their ramps, zero-mean periodic parts, resonance classification, and the
// periodic maximizer of B (meaningful for resonant xi).
struct ModeProfile {
  CircleGrid grid;
  Freq xi;
  Real r = 0;
  ArrayXr a, b;
  Real a0 = 0, b0 = 0;
  Primitive A, B;
  ArrayXr A_per, B_per;  // zero-mean periodic parts of the primitives
  bool resonant = false;
  Real res_margin = 0;   // distance of c0 to the nearest integer
  int c0_round = 0;      // nearest integer to a0
  int t_xi_index = 0;    // argmax of B over grid nodes, smallest index on ties
};

struct EvalOptions {
  Real eps_z = 1e-9;  // resonance tolerance
  int basepoint = 0;  // node index used for the primitives
  int threads = 0;
};

// true iff dist(a0, Z) <= eps_z and |b0| <= eps_z; margin is dist(c0, Z)
bool resonance_test(Real a0, Real b0, Real eps_z, Real* margin = nullptr);
bool resonance_test(const ModeProfile& profile, Real eps_z);

ModeProfile evaluate_mode(const SymbolSpec& spec, const CircleGrid& grid, const Freq& xi,
                          const EvalOptions& opts = {});
std::vector<ModeProfile> evaluate(const SymbolSpec& spec, const CircleGrid& grid,
                                  const FrequencyBox& box, const EvalOptions& opts = {});

// Numerical spot check of symbol-class membership: the measured constants
// C_alpha = max over the box of sup_t |D_t^alpha c(t,xi)| / (1+|xi|)^m
// for alpha = 0, 1, 2.  A validation aid, not a proof.
std::array<Real, 3> symbol_class_constants(const SymbolSpec& spec, const CircleGrid& grid,
                                           const FrequencyBox& box);

} // namespace tubesolv
