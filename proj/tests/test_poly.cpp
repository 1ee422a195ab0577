#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nqh/parse.hpp"
#include "nqh/poly.hpp"
#include "support.hpp"

using namespace nqh;
using nqh::testing::random_point;
using nqh::testing::random_poly;

namespace {

const SymbolTable kPlanar = SymbolTable::planar();

Poly P(const char* text) { return parse_poly(text, kPlanar); }

}  // namespace

TEST_CASE("ring operations") {
  const VarLayout L{1, 0};
  const Poly q = Poly::q(L, 0), p = Poly::p(L, 0);
  CHECK((q + p) + (q - p) == Rational(2) * q);
  CHECK(partial(p * p, L.p(0)) == Rational(2) * p);
  CHECK((q - q).is_zero());
  CHECK((q - q).terms().empty());  // no stored zero coefficients
  CHECK(pow(q + p, 3) == (q + p) * (q + p) * (q + p));
  CHECK(pow(q, 0) == Poly::constant(L, 1));
  CHECK((q * p).total_degree() == 2);
  CHECK((q * q * p).degree_in(L.q(0)) == 2);
}

TEST_CASE("product of j2 and j3") {
  CHECK(P("py") * P("y*px - x*py") == P("y*px*py - x*py^2"));
}

TEST_CASE("layout mismatch is a dimension error") {
  const Poly a = Poly::q(VarLayout{1, 0}, 0);
  const Poly b = Poly::q(VarLayout{2, 0}, 0);
  CHECK_THROWS_AS(a + b, DimensionError);
  CHECK_THROWS_AS(a * b, DimensionError);
  CHECK_THROWS_AS(poisson_bracket(a, b), DimensionError);
  CHECK_THROWS_AS(jacobi_identity_residual(a, a, b), DimensionError);
  CHECK_THROWS_AS(Poly::variable(VarLayout{1, 0}, 2), DimensionError);
}

TEST_CASE("canonical brackets") {
  const VarLayout L{2, 0};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      CHECK(poisson_bracket(Poly::q(L, i), Poly::p(L, j)) == Poly::constant(L, i == j ? 1 : 0));
      CHECK(poisson_bracket(Poly::q(L, i), Poly::q(L, j)).is_zero());
      CHECK(poisson_bracket(Poly::p(L, i), Poly::p(L, j)).is_zero());
    }
}

TEST_CASE("momentum brackets of the planar example") {
  const Poly j1 = P("px"), j2 = P("py"), j3 = P("y*px - x*py");
  CHECK(poisson_bracket(j1, j2).is_zero());
  CHECK(poisson_bracket(j2, j3) == -j1);
  CHECK(poisson_bracket(j3, j1) == -j2);
  CHECK(jacobi_identity_residual(j1, j2, j3).is_zero());
  const Poly q1 = Poly::q(VarLayout{1, 0}, 0), p1 = Poly::p(VarLayout{1, 0}, 0);
  CHECK(jacobi_identity_residual(q1, p1, q1 * p1).is_zero());
}

TEST_CASE("extra variables are constants for the bracket") {
  const SymbolTable s = SymbolTable::planar({"k"});
  const Poly f = parse_poly("k^2*x*px", s);
  CHECK(poisson_bracket(f, parse_poly("k", s)).is_zero());
  CHECK(poisson_bracket(parse_poly("x", s), f) == parse_poly("k^2*x", s));
}

TEST_CASE("bracket properties on random polynomials") {
  std::mt19937_64 rng(7);
  const VarLayout L{2, 1};
  for (int trial = 0; trial < 40; ++trial) {
    const Poly f = random_poly(rng, L, 4, 2);
    const Poly g = random_poly(rng, L, 4, 2);
    const Poly h = random_poly(rng, L, 3, 2);
    CHECK(poisson_bracket(f, g) == -poisson_bracket(g, f));
    CHECK(poisson_bracket(f, g * h) == poisson_bracket(f, g) * h + g * poisson_bracket(f, h));
    CHECK(poisson_bracket(f * g, h) == poisson_bracket(f, h) * g + f * poisson_bracket(g, h));
    CHECK(jacobi_identity_residual(f, g, h).is_zero());
    CHECK(poisson_bracket(f, Rational(3, 2) * g + h) ==
          Rational(3, 2) * poisson_bracket(f, g) + poisson_bracket(f, h));
  }
}

TEST_CASE("bracket agrees with finite differences") {
  std::mt19937_64 rng(11);
  const VarLayout L{2, 0};
  for (int trial = 0; trial < 10; ++trial) {
    const Poly f = random_poly(rng, L, 5, 3);
    const Poly g = random_poly(rng, L, 5, 3);
    const auto x = random_point(rng, 4);
    auto d = [&](const Poly& u, int v) {
      const double eps = 1e-5;
      auto xp = x, xm = x;
      xp[static_cast<std::size_t>(v)] += eps;
      xm[static_cast<std::size_t>(v)] -= eps;
      return (evaluate(u, xp) - evaluate(u, xm)) / (2 * eps);
    };
    double expected = 0.0;
    for (int i = 0; i < 2; ++i) expected += d(f, L.q(i)) * d(g, L.p(i)) - d(f, L.p(i)) * d(g, L.q(i));
    CHECK(evaluate(poisson_bracket(f, g), x) == doctest::Approx(expected).epsilon(1e-6));
  }
}

TEST_CASE("compose, specialize and widen") {
  const VarLayout L{1, 1};
  const Poly q = Poly::q(L, 0), p = Poly::p(L, 0), k = Poly::variable(L, L.extra(0));
  const Poly f = k * q * q + p;
  const std::vector<Rational> half{Rational(1, 2)};
  CHECK(specialize_extras(f, half) ==
        Rational(1, 2) * pow(Poly::q({1, 0}, 0), 2) + Poly::p({1, 0}, 0));
  const std::vector<Poly> swap{p, q, k};
  CHECK(compose(f, swap) == k * p * p + q);
  const Poly w = widen(Poly::q({1, 0}, 0), L);
  CHECK(w == q);
  CHECK_THROWS_AS(specialize_extras(f, std::vector<Rational>{}), DimensionError);
}

TEST_CASE("momentum ideal membership") {
  CHECK(in_momentum_ideal(P("x*px + y^2*py")));
  CHECK_FALSE(in_momentum_ideal(P("x*px + y")));
  CHECK(in_momentum_ideal(Poly(VarLayout{2, 0})));
}

TEST_CASE("express in generators") {
  const std::vector<Poly> gens{P("px"), P("py"), P("y*px - x*py")};
  const SymbolTable J = SymbolTable::generators(3);

  auto f = express_in_generators(P("py*(y*px - x*py)"), gens, 2);
  REQUIRE(f);
  CHECK(*f == parse_poly("J2*J3", J));

  f = express_in_generators(P("px^2 + py^2"), gens, 2);
  REQUIRE(f);
  CHECK(*f == parse_poly("J1^2 + J2^2", J));

  CHECK_FALSE(express_in_generators(P("x"), gens, 4));
  CHECK_THROWS_AS(express_in_generators(P("px"), gens, 0), std::invalid_argument);

  // Degree bound: J1^3 is not reachable at degree 2.
  CHECK_FALSE(express_in_generators(P("px^3"), gens, 2));
  CHECK(express_in_generators(P("px^3"), gens, 3));
}

TEST_CASE("collective elliptic Hamiltonian with symbolic k") {
  const SymbolTable s = SymbolTable::planar({"k"});
  const Poly h = parse_poly(
      "1/2*((1 + k^2/2)*px^2 + (1 - k^2/2)*py^2 + (y*px - x*py)^2)", s);
  const std::vector<Poly> gens{parse_poly("px", s), parse_poly("py", s),
                               parse_poly("y*px - x*py", s)};
  const auto f = express_in_generators(h, gens, 2);
  REQUIRE(f);
  const SymbolTable J = SymbolTable::generators(3, {"k"});
  CHECK(*f == parse_poly("1/2*((1 + k^2/2)*J1^2 + (1 - k^2/2)*J2^2 + J3^2)", J));
  CHECK(substitute_generators(*f, gens) == h);
}

TEST_CASE("express in generators is sound on random targets") {
  std::mt19937_64 rng(5);
  const VarLayout L{2, 0};
  const std::vector<Poly> gens{P("px"), P("py"), P("y*px - x*py")};
  for (int trial = 0; trial < 15; ++trial) {
    const Poly F = random_poly(rng, VarLayout{0, 3}, 4, 2);
    if (F.total_degree() > 4) continue;
    const Poly target = substitute_generators(F, gens);
    const auto found = express_in_generators(target, gens, 4);
    REQUIRE(found);
    CHECK(substitute_generators(*found, gens) == target);
    // A position term breaks expressibility.
    CHECK_FALSE(express_in_generators(target + Poly::q(L, 0), gens, 4));
  }
}

TEST_CASE("compiled evaluation matches exact evaluation") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Poly f = random_poly(rng, VarLayout{2, 0}, 6, 4);
    const auto x = random_point(rng, 4, 2.0);
    const CompiledPoly c(f);
    CHECK(c(x) == doctest::Approx(evaluate(f, x)).epsilon(1e-13));
  }
  CHECK(to_double(Rational(1, 3)) == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(evaluate(P("x"), std::vector<double>{1.0}), DimensionError);
}
