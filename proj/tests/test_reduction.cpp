#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nqh/jacobi_elliptic.hpp"
#include "nqh/reduction.hpp"
#include "support.hpp"

using namespace nqh;

namespace {

const SystemSpec& elliptic() {
  static const SystemSpec s = builtin("elliptic", Rational(1, 2));
  return s;
}

const std::vector<double> kS0{-1.0, 0.0, 0.0, 1.0};

double worst(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

// Composite Simpson rule for dn^2 on [0, t].
double integral_dn2(double t, EllipticModulus k) {
  if (t == 0.0) return 0.0;
  const int n = 2000;
  const double h = t / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double d = dn(i * h, k);
    s += (i == 0 || i == n ? 1 : (i % 2 ? 4 : 2)) * d * d;
  }
  return s * h / 3;
}

}  // namespace

TEST_CASE("closure of the elliptic system") {
  const ClosureReport r = verify_closure(elliptic());
  REQUIRE(r.pass);
  REQUIRE(r.entries.size() == 3);
  const SymbolTable& J = r.generator_symbols;
  CHECK(*r.entries[0].expression == parse_poly("J2*J3", J));
  CHECK(*r.entries[1].expression == parse_poly("-J1*J3", J));
  CHECK(*r.entries[2].expression == parse_poly("-1/4*J1*J2", J));
  REQUIRE(r.symbolic_generator_symbols);
  CHECK(to_string(*r.entries[2].symbolic_expression, *r.symbolic_generator_symbols) == "-k^2*J1*J2");
  CHECK(to_string(*r.entries[0].symbolic_expression, *r.symbolic_generator_symbols) == "J2*J3");
}

TEST_CASE("closure of the other systems") {
  const ClosureReport g = verify_closure(builtin("linear-gravity"));
  CHECK(g.pass);
  CHECK(*g.entries[0].expression == Poly::constant(VarLayout{0, 1}, -1));
  const ClosureReport f = verify_closure(builtin("free-particle"));
  CHECK(f.pass);
  for (const auto& e : f.entries) CHECK(e.expression->is_zero());
}

TEST_CASE("closure failure") {
  SystemSpec s = builtin("free-particle");
  s.hamiltonian = parse_poly("(px^2 + py^2)/2 + x^2", s.symbols);
  const ClosureReport r = verify_closure(s);
  CHECK_FALSE(r.pass);
  CHECK_FALSE(r.entries[0].ok());
  CHECK_THROWS_AS(first_reconstruction_field(s), ClosureFailureError);
}

TEST_CASE("invariant descent") {
  const SystemSpec& e = elliptic();
  const Poly& sigma = e.invariant_generators[0];
  for (const Poly& f : {sigma, pow(sigma, 2)}) {
    const DescentReport d = verify_invariant_descent(e, f, 100);
    CHECK(d.samples == 100);
    CHECK(d.max_relative_deviation <= 1e-9);
    CHECK(d.derivative.is_zero());
  }
  const SystemSpec g = builtin("linear-gravity");
  const DescentReport d = verify_invariant_descent(g, g.invariant_generators[0], 100);
  CHECK(d.max_relative_deviation == 0.0);
  CHECK(d.derivative == Poly::constant(g.hamiltonian.layout(), -1));
  CHECK_THROWS_AS(verify_invariant_descent(e, parse_poly("x", e.symbols), 10), NotInvariantError);
}

TEST_CASE("reduced dynamics") {
  const SystemSpec& e = elliptic();
  const Poly& sigma = e.invariant_generators[0];
  CHECK(reduced_dynamics(e, sigma)->is_zero());
  CHECK(reduced_dynamics(e, pow(sigma, 2))->is_zero());
  const SystemSpec g = builtin("linear-gravity");
  CHECK(*reduced_dynamics(g, g.invariant_generators[0]) == Poly::constant(VarLayout{0, 1}, -1));

  const auto grid = uniform_grid(0.0, 10.0, 101);
  const Trajectory r = reduced_trajectory(g, std::vector<double>{0.3, 1.0}, 0.0, 10.0, IntegratorConfig{}, grid);
  for (std::size_t i = 0; i < r.size(); ++i) CHECK(std::abs(r.states[i][0] - (1.0 - r.times[i])) <= 1e-12);
}

TEST_CASE("first reconstruction reproduces the Jacobi functions") {
  const EllipticModulus k(0.5);
  const auto grid = uniform_grid(0.0, 10.0, 1001);
  const Trajectory mu = first_reconstruction(elliptic(), std::vector<double>{0.0, 1.0, 1.0}, 0.0, 10.0,
                                             IntegratorConfig{}, grid);
  double err = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const auto v = jacobi_elliptic(mu.times[i], k);
    err = std::max({err, std::abs(mu.states[i][0] - v.sn), std::abs(mu.states[i][1] - v.cn),
                    std::abs(mu.states[i][2] - v.dn)});
  }
  CHECK(err <= 1e-8);

  const Trajectory eq = first_reconstruction(elliptic(), std::vector<double>{0.0, 0.0, 0.7}, 0.0, 10.0,
                                             IntegratorConfig{}, grid);
  for (const auto& s : eq.states) CHECK(s == std::vector<double>{0.0, 0.0, 0.7});

  const Trajectory lin = first_reconstruction(builtin("linear-gravity"), std::vector<double>{1.0}, 0.0,
                                              10.0, IntegratorConfig{}, grid);
  CHECK(std::abs(lin.back()[0] - (1.0 - 10.0)) <= 1e-10);
}

TEST_CASE("momenta along direct trajectories obey the first reconstruction equation") {
  std::mt19937_64 rng(31);
  for (const SystemSpec& s : {elliptic(), builtin("linear-gravity"), builtin("free-particle")}) {
    const VectorField f = first_reconstruction_field(s);
    for (int trial = 0; trial < 3; ++trial) {
      const auto s0 = nqh::testing::random_point(rng, s.state_dimension(), 1.0);
      const auto grid = uniform_grid(0.0, 5.0, 5001);
      const Trajectory t = direct_trajectory(s, s0, 0.0, 5.0, IntegratorConfig{}, grid);
      double residual = 0.0;
      for (std::size_t i = 1; i + 1 < t.size(); ++i) {
        const auto mu = momentum_map(s, t.states[i]);
        const auto mp = momentum_map(s, t.states[i + 1]);
        const auto mm = momentum_map(s, t.states[i - 1]);
        std::vector<double> rhs(mu.size());
        f(t.times[i], mu, rhs);
        for (std::size_t a = 0; a < mu.size(); ++a) {
          const double fd = (mp[a] - mm[a]) / (t.times[i + 1] - t.times[i - 1]);
          residual = std::max(residual, std::abs(fd - rhs[a]));
        }
      }
      CHECK(residual <= 1e-6);
    }
  }
}

TEST_CASE("moving line reconstruction") {
  const auto grid = uniform_grid(0.0, 10.0, 1001);
  const ReconstructionResult r = moving_line_reconstruction(elliptic(), kS0, 0.0, 10.0, IntegratorConfig{}, grid);
  CHECK(worst(r.max_error) <= 1e-6);
  CHECK(r.line_parameter.front() == 0.0);

  double mean = 0.0;
  for (double v : r.projected_speed) mean += v;
  mean /= static_cast<double>(r.projected_speed.size());
  double var = 0.0;
  for (double v : r.projected_speed) var += (v - mean) * (v - mean);
  CHECK(std::abs(mean - 1.875) <= 1e-8);
  CHECK(std::sqrt(var / static_cast<double>(r.projected_speed.size())) <= 1e-8);

  // The line rotates, so s picks up 1.875 t minus the integral of dn^2.
  const EllipticModulus k(0.5);
  double closed = 0.0, naive = 0.0;
  for (std::size_t i = 0; i < r.times.size(); i += 10) {
    const double t = r.times[i];
    const auto v = jacobi_elliptic(t, k);
    const double s = 1.875 * t - integral_dn2(t, k);
    CHECK(std::abs(r.line_parameter[i] - s) <= 1e-6);
    CHECK(std::abs(r.arc_rate[i] - (1.875 - v.dn * v.dn)) <= 1e-7);
    const auto& q = r.phase.states[i];
    closed = std::max({closed, std::abs(q[0] - (-v.dn * v.cn + s * v.sn)),
                       std::abs(q[1] - (v.dn * v.sn + s * v.cn))});
    naive = std::max(naive, std::abs(q[0] - (-v.dn * v.cn + 1.875 * t * v.sn)));
  }
  CHECK(closed <= 1e-6);
  CHECK(naive > 1.0);

  for (std::size_t i = 0; i < r.times.size(); ++i) {
    CHECK(std::abs(invariants(elliptic(), r.phase.states[i])[0] - r.reduced.states[i][0]) <= 1e-7);
  }

  CHECK_THROWS_AS(moving_line_reconstruction(elliptic(), std::vector<double>{1.0, 2.0, 0.0, 0.0}, 0.0,
                                             1.0, IntegratorConfig{}, grid),
                  DegenerateMomentumError);
}

TEST_CASE("moving line off the unit circle") {
  const std::vector<double> s0{0.4, -0.7, 1.3, 0.6};
  const ReconstructionResult r =
      moving_line_reconstruction(elliptic(), s0, 0.0, 10.0, IntegratorConfig{}, uniform_grid(0.0, 10.0, 501));
  CHECK(worst(r.max_error) <= 1e-6);
}

TEST_CASE("second reconstruction") {
  const auto grid = uniform_grid(0.0, 10.0, 1001);
  const IntegratorConfig cfg;
  const Lift lift = canonical_lift(elliptic(), kS0, 0.0, 10.0, cfg, grid);
  const VectorField X = hamiltonian_vector_field(elliptic());
  const SecondReconstructionResult r = second_reconstruction(elliptic(), lift, X);
  const Trajectory ref = direct_trajectory(elliptic(), kS0, 0.0, 10.0, cfg, grid);
  CHECK(worst(max_abs_error(r.phase.states, ref.states)) <= 1e-5);
  CHECK(r.constraint_residual <= 1e-6);

  CHECK_THROWS_AS(second_reconstruction(elliptic(), perturb_lift(elliptic(), lift, 1e-2), X),
                  InconsistentLiftError);

  SecondReconstructionConfig restricted;
  restricted.restrict_to_isotropy = true;
  const SecondReconstructionResult rr = second_reconstruction(elliptic(), lift, X, restricted);
  CHECK(rr.equation_residual > 1e-3);
}

TEST_CASE("second reconstruction on the true solution stays at the identity") {
  const auto grid = uniform_grid(0.0, 10.0, 1001);
  const Trajectory ref = direct_trajectory(elliptic(), kS0, 0.0, 10.0, IntegratorConfig{}, grid);
  Lift lift;
  lift.times = ref.times;
  lift.states = ref.states;
  for (const auto& s : ref.states) {
    lift.momentum.push_back(momentum_map(elliptic(), s));
    lift.reduced.push_back(invariants(elliptic(), s));
  }
  lift.g0 = {0.0, 0.0, 0.0};
  const auto r = second_reconstruction(elliptic(), lift, hamiltonian_vector_field(elliptic()));
  for (const auto& g : r.group_curve)
    for (double v : g) CHECK(std::abs(v) <= 1e-6);
}

TEST_CASE("second reconstruction for linear gravity") {
  const SystemSpec g = builtin("linear-gravity");
  const std::vector<double> s0{0.5, 1.0};
  const auto grid = uniform_grid(0.0, 10.0, 201);
  const Lift lift = canonical_lift(g, s0, 0.0, 10.0, IntegratorConfig{}, grid);
  const auto r = second_reconstruction(g, lift, hamiltonian_vector_field(g));
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    const double t = r.times[i];
    CHECK(std::abs(r.phase.states[i][0] - (0.5 + t - t * t / 2)) <= 1e-8);
    CHECK(std::abs(r.phase.states[i][1] - (1.0 - t)) <= 1e-7);
  }
}

TEST_CASE("split flow") {
  const HamiltonianSplit split = split_hamiltonian(elliptic());
  CHECK(split.commutes());
  CHECK(split.invariant_part == parse_poly("(px^2 + py^2)/2", elliptic().symbols));
  CHECK(split.invariant_part + split.collective_part == elliptic().hamiltonian);

  const IntegratorConfig cfg;
  for (double t : {0.5, 1.0, 2.0, 5.0}) {
    const Trajectory ref = direct_trajectory(elliptic(), kS0, 0.0, t, cfg);
    for (SplitOrder o : {SplitOrder::sigma_then_j, SplitOrder::j_then_sigma}) {
      const PhaseState c = split_flow_reconstruction(elliptic(), kS0, t, cfg, o);
      CHECK(worst(max_abs_error({c}, {ref.back()})) <= 1e-6);
    }
  }

  const PhaseState free = split_flow_reconstruction(builtin("free-particle"),
                                                    std::vector<double>{0.0, 0.0, 1.0, 2.0}, 1.0, cfg);
  CHECK(free == PhaseState{1.0, 2.0, 1.0, 2.0});

  const auto grid = uniform_grid(0.0, 10.0, 1001);
  const Trajectory tr = split_flow_trajectory(elliptic(), kS0, 0.0, 10.0, cfg, grid);
  const Trajectory ref = direct_trajectory(elliptic(), kS0, 0.0, 10.0, cfg, grid);
  CHECK(worst(max_abs_error(tr.states, ref.states)) <= 1e-6);

  CHECK_THROWS_AS(split_hamiltonian(builtin("linear-gravity")), std::invalid_argument);
  SystemSpec bad = builtin("free-particle");
  bad.hamiltonian = parse_poly("(px^2 + py^2)/2 + x", bad.symbols);
  CHECK_THROWS_AS(split_flow_reconstruction(bad, kS0, 1.0, cfg), SplitNotCommutingError);
}

TEST_CASE("reconstructions agree with each other") {
  const auto grid = uniform_grid(0.0, 10.0, 1001);
  const IntegratorConfig cfg;
  const auto line = moving_line_reconstruction(elliptic(), kS0, 0.0, 10.0, cfg, grid);
  const auto second = second_reconstruction(elliptic(), canonical_lift(elliptic(), kS0, 0.0, 10.0, cfg, grid),
                                            hamiltonian_vector_field(elliptic()));
  const auto split = split_flow_trajectory(elliptic(), kS0, 0.0, 10.0, cfg, grid);
  CHECK(worst(max_abs_error(line.phase.states, second.phase.states)) <= 1e-5);
  CHECK(worst(max_abs_error(line.phase.states, split.states)) <= 1e-5);
  for (const auto& s : split.states) CHECK(std::abs(invariants(elliptic(), s)[0] - 1.0) <= 1e-7);
}
