#pragma once

#include <memory>
#include <string>

#include "tubesolv/types.hpp"

namespace tubesolv {

// Small closed-form expressions used by symbol configurations.
//
// Time expressions (variable t) are trigonometric polynomials: sums/products
// of constants, sin(k*t), cos(k*t) with integer k, and nonnegative integer
// powers, so sampled evaluation stays band-limited.
//
// Radial expressions (variable r = |xi|) additionally allow real exponents
// (r^1.5) and forbid trig terms.  Negative powers evaluate to 0 at r = 0, so
// negative-order symbols stay finite on the zero frequency.
enum class ExprVar { Time, Radial };

class Expr {
 public:
  Expr() = default;

  Real operator()(Real v) const;
  bool empty() const { return !root_; }
  const std::string& text() const { return text_; }

  // maximal trig degree times power nesting; 0 for constants
  int trig_degree() const;

  static Expr parse(const std::string& text, ExprVar var);
  static Expr constant(Real value);

  struct Node;  // implementation detail, public so the parser can build trees

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
};

} // namespace tubesolv
