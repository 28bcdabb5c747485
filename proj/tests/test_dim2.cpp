#include <doctest.h>

#include "support.hpp"
#include "tubesolv/homogeneous.hpp"
#include "tubesolv/solver.hpp"

// two-dimensional frequency boxes: enumeration, ray reduction, and the
// pipeline pieces that depend on |xi| rather than a single integer index

using namespace tubesolv;

namespace {

Freq f2(int a, int b) {
  Freq xi(2);
  xi[0] = a;
  xi[1] = b;
  return xi;
}

SymbolSpec homogeneous(Real order, const std::string& a, const std::string& b) {
  HomogeneousSymbol h;
  h.a = Expr::parse(a, ExprVar::Time);
  h.b = Expr::parse(b, ExprVar::Time);
  SymbolSpec spec;
  spec.order = order;
  spec.variant = h;
  return spec;
}

} // namespace

TEST_CASE("frequency box enumeration in two dimensions") {
  FrequencyBox box(2, 2.5);
  // lattice points with |xi| <= 2.5: |xi|^2 in {0,1,2,4,5}
  CHECK(box.size() == 21);
  CHECK(box.index_of(f2(0, 0)) >= 0);
  CHECK(box.index_of(f2(2, 1)) >= 0);
  CHECK(box.index_of(f2(2, 2)) < 0);  // norm > 2.5
  // deterministic lexicographic order
  CHECK(box.index_of(f2(-2, -1)) < box.index_of(f2(-2, 1)));
  CHECK(box.index_of(f2(-2, 1)) < box.index_of(f2(0, -1)));
  CHECK(FrequencyBox::norm_of(f2(1, 1)) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("gcd and primitive directions") {
  CHECK(freq_gcd(f2(4, 6)) == 2);
  CHECK(freq_gcd(f2(0, 3)) == 3);
  CHECK(freq_gcd(f2(0, 0)) == 0);
  CHECK(freq_gcd(f2(-3, 5)) == 1);
}

TEST_CASE("homogeneous scaling is exact along two-dimensional rays") {
  CircleGrid grid(64);
  const SymbolSpec spec = homogeneous(1, "0.25", "sin(t)");
  const ArrayXc base = symbol_samples(spec, grid, f2(1, 1));
  const ArrayXc twice = symbol_samples(spec, grid, f2(2, 2));
  const ArrayXc thrice = symbol_samples(spec, grid, f2(3, 3));
  for (int j = 0; j < grid.n; ++j) {
    CHECK(twice[j] == 2.0 * base[j]);
    CHECK(thrice[j] == 3.0 * base[j]);
  }
  // base values carry the primitive direction's norm
  const ModeProfile p = evaluate_mode(spec, grid, f2(1, 1));
  CHECK(p.a0 == doctest::Approx(0.25 * std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("corollary verdict over two-dimensional boxes") {
  CircleGrid grid(256);
  FrequencyBox box(2, 8);
  const CorollaryReport uni = corollary_verdict(homogeneous(1, "0", "sin(t)"), grid, box, {});
  CHECK(uni.solvable);
  const CorollaryReport bi = corollary_verdict(homogeneous(1, "0", "cos(2*t)"), grid, box, {});
  CHECK_FALSE(bi.solvable);

  // and the general conditions route agrees at this cutoff
  for (const char* b : {"sin(t)", "cos(2*t)"}) {
    const SymbolSpec spec = homogeneous(1, "0", b);
    const auto profiles = evaluate(spec, grid, box);
    std::vector<DioMargin> margins;
    std::vector<OscillationConstants> constants;
    for (const auto& p : profiles) {
      margins.push_back(dio_margin(p));
      constants.push_back(oscillation_constants(p, 1));
    }
    const Verdict v = aggregate(margins, constants, box.K);
    CHECK(v.solvable_at_cutoff == (std::string(b) == "sin(t)"));
  }
}

TEST_CASE("solve and field io across a two-dimensional box") {
  CircleGrid grid(128);
  FrequencyBox box(2, 3);
  const SymbolSpec spec = tstest::tabulated_symbol(grid, box, 0, [](Real t, const Freq& xi) {
    return (xi[0] + xi[1]) % 2 ? Complex(0.4, 0.3 * std::sin(t)) : Complex(0, std::sin(t));
  });
  const auto profiles = evaluate(spec, grid, box);
  FourierField u0(grid, box);
  for (int i = 0; i < box.size(); ++i)
    u0.set_slice(i, tstest::random_bandlimited(grid, 6, 2.0, 900u + i));
  const FourierField f = apply_P(u0, profiles);
  const GlobalSolution sol = solve_global(f, profiles);
  CHECK(sol.diag.residual_rel < 1e-8);

  const std::string path = "/tmp/tubesolv_dim2_field.bin";
  write_field_binary(path, sol.u);
  const FourierField back = read_field(path);
  CHECK(back.box.N == 2);
  CHECK((back.data - sol.u.data).cwiseAbs().maxCoeff() == 0.0);
  std::remove(path.c_str());
}
