#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "nqh/systems.hpp"
#include "support.hpp"

using namespace nqh;
using nqh::testing::random_point;

namespace {

const SystemSpec& elliptic() {
  static const SystemSpec s = builtin("elliptic", Rational(1, 2));
  return s;
}

}  // namespace

TEST_CASE("catalog") {
  for (const auto& name : builtin_names()) {
    if (name == "elliptic") continue;
    CHECK_NOTHROW(builtin(name));
  }
  CHECK_THROWS_AS(builtin("pendulum"), UnknownSystemError);
  CHECK_THROWS_AS(builtin("elliptic", Rational(3, 2)), std::domain_error);
  CHECK_THROWS_AS(builtin("elliptic", Rational(1)), std::domain_error);
  CHECK_THROWS_AS(builtin("elliptic", Rational(0)), std::domain_error);
  CHECK_THROWS_AS(builtin("elliptic"), std::domain_error);
  CHECK(elliptic().parameter("k") == Rational(1, 2));
  CHECK_FALSE(elliptic().parameter("m"));
}

TEST_CASE("elliptic bracket table with symbolic k") {
  const SymbolicForms& f = *elliptic().symbolic;
  const SymbolTable& s = f.symbols;
  const Poly& h = f.hamiltonian;
  const Poly &j1 = f.momenta[0], &j2 = f.momenta[1], &j3 = f.momenta[2];
  CHECK(poisson_bracket(j1, j2).is_zero());
  CHECK(poisson_bracket(j2, j3) == -j1);
  CHECK(poisson_bracket(j3, j1) == -j2);
  CHECK(poisson_bracket(j1, h) == j2 * j3);
  CHECK(poisson_bracket(j2, h) == -(j1 * j3));
  CHECK(poisson_bracket(j3, h) == -(parse_poly("k^2", s) * j1 * j2));
  CHECK(poisson_bracket(f.invariant_generators[0], h).is_zero());
  CHECK(h == parse_poly("1/2*((1 + k^2/2)*px^2 + (1 - k^2/2)*py^2 + (y*px - x*py)^2)", s));
}

TEST_CASE("specialized elliptic system at k = 1/2") {
  const SystemSpec& e = elliptic();
  const Poly &j1 = e.momenta[0], &j2 = e.momenta[1], &j3 = e.momenta[2];
  CHECK(poisson_bracket(j3, e.hamiltonian) == Rational(-1, 4) * j1 * j2);
  CHECK(poisson_bracket(j1, e.hamiltonian) == parse_poly("py*(y*px - x*py)", e.symbols));
  CHECK(jacobi_identity_residual(e.hamiltonian, j1, j2).is_zero());
  CHECK(jacobi_identity_residual(j1, j2, j3).is_zero());
}

TEST_CASE("construction rejects a wrong momentum table") {
  SystemSpec s = builtin("free-particle");
  s.momenta[2] = -s.momenta[2];
  CHECK_THROWS_AS(s.validate(), std::logic_error);
}

TEST_CASE("linear gravity") {
  const SystemSpec g = builtin("linear-gravity");
  CHECK(g.momenta.size() == 1);
  CHECK(g.momenta[0] == parse_poly("p", g.symbols));
  CHECK(g.invariant_generators[0] == parse_poly("p", g.symbols));
  CHECK(hamiltonian_velocity(g, std::vector<double>{0.0, 2.0}) == std::vector<double>{2.0, -1.0});
  CHECK(poisson_bracket(g.momenta[0], g.hamiltonian) == Poly::constant(g.hamiltonian.layout(), -1));
}

TEST_CASE("elliptic Hamiltonian vector field") {
  const SystemSpec& e = elliptic();
  const auto v = hamiltonian_velocity(e, std::vector<double>{-1.0, 0.0, 0.0, 1.0});
  CHECK(v[0] == 0.0);
  CHECK(v[1] == 1.875);  // 1 - k^2/2 + x^2
  CHECK(v[2] == 1.0);
  CHECK(v[3] == 0.0);

  // Against finite differences of h.
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const auto s = random_point(rng, 4, 2.0);
    const auto x = hamiltonian_velocity(e, s);
    auto dh = [&](std::size_t i) {
      auto sp = s, sm = s;
      sp[i] += 1e-6;
      sm[i] -= 1e-6;
      return (evaluate(e.hamiltonian, sp) - evaluate(e.hamiltonian, sm)) / 2e-6;
    };
    CHECK(x[0] == doctest::Approx(dh(2)).epsilon(1e-7));
    CHECK(x[1] == doctest::Approx(dh(3)).epsilon(1e-7));
    CHECK(x[2] == doctest::Approx(-dh(0)).epsilon(1e-7));
    CHECK(x[3] == doctest::Approx(-dh(1)).epsilon(1e-7));
  }

  for (int trial = 0; trial < 10; ++trial) {
    auto s = random_point(rng, 4, 3.0);
    s[2] = s[3] = 0.0;
    CHECK(hamiltonian_velocity(e, s) == std::vector<double>(4, 0.0));
  }
  for (const auto& c : hamiltonian_vector_field_components(e)) CHECK(in_momentum_ideal(c));

  CHECK_THROWS_AS(hamiltonian_velocity(e, std::vector<double>{std::nan(""), 0, 0, 1}),
                  std::domain_error);
  CHECK_THROWS_AS(hamiltonian_velocity(e, std::vector<double>{0, 0, 1}), DimensionError);
}

TEST_CASE("momentum map") {
  const SystemSpec& e = elliptic();
  CHECK(momentum_map(e, std::vector<double>{-1.0, 0.0, 0.0, 1.0}) == CoalgPoint{0.0, 1.0, 1.0});
  CHECK(momentum_map(e, std::vector<double>{2.0, -3.0, 0.0, 0.0}) == CoalgPoint{0.0, 0.0, 0.0});
  CHECK(invariants(e, std::vector<double>{5.0, 1.0, 3.0, 4.0}) == std::vector<double>{25.0});
}

TEST_CASE("momentum map is coadjoint equivariant") {
  // In the matrix realization the coadjoint image of mu is g mu g^-1 read off
  // with tr(. e_b)/2. The third component of j pairs with -e3, hence D.
  const SystemSpec& e = elliptic();
  const GroupDescriptor& d = e.group();
  const Eigen::Vector3d D(1.0, 1.0, -1.0);
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = e.action->random_element(rng);
    const auto s = random_point(rng, 4, 2.0);
    const auto mu = momentum_map(e, s);
    Eigen::Matrix3d M = Eigen::Matrix3d::Zero();
    for (int a = 0; a < 3; ++a) M += D(a) * mu[static_cast<std::size_t>(a)] * d.dual_matrices[static_cast<std::size_t>(a)];
    const Eigen::Matrix3d G = Se2CotangentAction::element(g).matrix();
    const Eigen::Matrix3d Mg = G * M * G.inverse();
    const auto lhs = momentum_map(e, act(e, g, s));
    for (int b = 0; b < 3; ++b) {
      const double coord = 0.5 * (Mg * d.basis_matrices[static_cast<std::size_t>(b)]).trace();
      CHECK(lhs[static_cast<std::size_t>(b)] == doctest::Approx(D(b) * coord).epsilon(1e-12));
    }
  }
}

TEST_CASE("invariant generators are invariant") {
  std::mt19937_64 rng(25);
  for (const auto& name : {"free-particle", "linear-gravity"}) {
    const SystemSpec s = builtin(name);
    for (int trial = 0; trial < 10; ++trial) {
      const auto g = s.action->random_element(rng);
      const auto x = random_point(rng, s.state_dimension(), 2.0);
      CHECK(invariants(s, act(s, g, x))[0] == doctest::Approx(invariants(s, x)[0]).epsilon(1e-13));
    }
  }
  const SystemSpec f = builtin("free-particle");
  for (const auto& j : f.momenta) CHECK(poisson_bracket(j, f.hamiltonian).is_zero());
}

TEST_CASE("halfplane demo") {
  const SystemSpec h = builtin("halfplane-demo");
  CHECK_FALSE(h.symplectic);
  CHECK_THROWS_AS(hamiltonian_vector_field_components(h), NotSymplecticError);
  CHECK(hamiltonian_velocity(h, std::vector<double>{0.0, 3.0}) == std::vector<double>{1.0, 9.0});
  // x is invariant under y-scaling, y is not.
  const auto r = act(h, std::vector<double>{0.5}, std::vector<double>{2.0, 1.0});
  CHECK(invariants(h, r)[0] == 2.0);
  CHECK(r[1] != 1.0);
}
