#include "nqh/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace nqh {

namespace {

void require_symplectic(const SystemSpec& spec) {
  if (!spec.symplectic) throw NotSymplecticError(spec.name + " is not a Hamiltonian system");
}

void require_invariant(const SystemSpec& spec, const Poly& f) {
  for (std::size_t a = 0; a < spec.momenta.size(); ++a) {
    if (!poisson_bracket(f, spec.momenta[a]).is_zero()) {
      throw NotInvariantError("function is not invariant: {f, j" + std::to_string(a + 1) +
                              "} != 0");
    }
  }
}

bool is_planar_se2(const SystemSpec& spec) {
  return spec.symplectic && spec.n_dof == 2 && spec.group().name == "SE(2)";
}

double dot2(double a0, double a1, double b0, double b1) { return a0 * b0 + a1 * b1; }

// Degree-4 Lagrange interpolation of sampled vectors: value and derivative.
class SampledCurve {
 public:
  SampledCurve(const std::vector<double>& times, const std::vector<std::vector<double>>& values)
      : t_(times), y_(values) {
    if (t_.size() < 5) throw std::invalid_argument("lift needs at least 5 samples");
  }

  void eval(double t, std::vector<double>& value, std::vector<double>& deriv) const {
    const std::size_t n = y_.front().size();
    value.assign(n, 0.0);
    deriv.assign(n, 0.0);
    auto it = std::upper_bound(t_.begin(), t_.end(), t);
    std::size_t i = it == t_.begin() ? 0 : static_cast<std::size_t>(it - t_.begin()) - 1;
    std::size_t start = i >= 2 ? i - 2 : 0;
    start = std::min(start, t_.size() - 5);
    const double* x = &t_[start];
    for (std::size_t j = 0; j < 5; ++j) {
      double lj = 1.0, dlj = 0.0;
      for (std::size_t m = 0; m < 5; ++m) {
        if (m == j) continue;
        const double denom = x[j] - x[m];
        // Product-rule derivative of the basis polynomial.
        dlj = dlj * (t - x[m]) / denom + lj / denom;
        lj *= (t - x[m]) / denom;
      }
      const auto& yj = y_[start + j];
      for (std::size_t k = 0; k < n; ++k) {
        value[k] += lj * yj[k];
        deriv[k] += dlj * yj[k];
      }
    }
  }

  void eval(double t, std::vector<double>& value) const {
    std::vector<double> unused;
    eval(t, value, unused);
  }

 private:
  const std::vector<double>& t_;
  const std::vector<std::vector<double>>& y_;
};

Eigen::VectorXd dexp_inverse(const GroupDescriptor& g, const Eigen::VectorXd& u,
                             const Eigen::VectorXd& w) {
  const Eigen::VectorXd uw = g.bracket(u, w);
  return w - 0.5 * uw + g.bracket(u, uw) / 12.0;
}

}  // namespace

InconsistentLiftError::InconsistentLiftError(double residual, double threshold)
    : std::runtime_error("inconsistent lift: residual " + std::to_string(residual) +
                         " exceeds " + std::to_string(threshold)),
      residual_(residual) {}

ClosureReport verify_closure(const SystemSpec& spec, unsigned max_degree) {
  require_symplectic(spec);
  ClosureReport report;
  const std::size_t m = spec.momenta.size();
  report.generator_symbols = SymbolTable::generators(m);
  if (spec.symbolic) {
    report.symbolic_generator_symbols =
        SymbolTable::generators(m, spec.symbolic->parameter_names);
  }
  report.pass = true;
  for (std::size_t a = 0; a < m; ++a) {
    ClosureEntry e;
    e.index = a;
    e.bracket = poisson_bracket(spec.momenta[a], spec.hamiltonian);
    e.expression = express_in_generators(e.bracket, spec.momenta, max_degree);
    if (spec.symbolic) {
      const auto& sym = *spec.symbolic;
      e.symbolic_bracket = poisson_bracket(sym.momenta[a], sym.hamiltonian);
      e.symbolic_expression = express_in_generators(*e.symbolic_bracket, sym.momenta, max_degree);
      if (!e.symbolic_expression) report.pass = false;
    }
    if (!e.expression) report.pass = false;
    report.entries.push_back(std::move(e));
  }
  return report;
}

DescentReport verify_invariant_descent(const SystemSpec& spec, const Poly& f,
                                       std::size_t n_samples, std::uint64_t seed) {
  require_symplectic(spec);
  require_invariant(spec, f);
  DescentReport report;
  report.samples = n_samples;
  report.derivative = poisson_bracket(f, spec.hamiltonian);
  const CompiledPoly xf(report.derivative);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  for (std::size_t i = 0; i < n_samples; ++i) {
    PhaseState s(spec.state_dimension());
    for (auto& v : s) v = coord(rng);
    const auto g = spec.action->random_element(rng);
    const PhaseState gs = spec.action->act(g, s);
    const double a = xf(gs), b = xf(s);
    const double scale = std::max({1.0, std::abs(a), std::abs(b)});
    report.max_relative_deviation = std::max(report.max_relative_deviation, std::abs(a - b) / scale);
  }
  return report;
}

std::optional<Poly> reduced_dynamics(const SystemSpec& spec, const Poly& f, unsigned max_degree) {
  require_symplectic(spec);
  require_invariant(spec, f);
  return express_in_generators(poisson_bracket(f, spec.hamiltonian), spec.invariant_generators,
                               max_degree);
}

Trajectory reduced_trajectory(const SystemSpec& spec, std::span<const double> s0, double t0,
                              double t1, const IntegratorConfig& cfg,
                              std::span<const double> samples) {
  if (!spec.symplectic) {
    // Reduced field of a raw vector field, on the invariant coordinate.
    std::vector<double> r0 = {evaluate(spec.invariant_generators.front(), s0)};
    auto traj = integrate_ode(spec.reduced_field, r0, t0, t1, cfg, samples);
    traj.system = spec.name;
    return traj;
  }
  std::vector<CompiledPoly> rhs;
  for (const auto& f : spec.invariant_generators) {
    auto r = reduced_dynamics(spec, f);
    if (!r) throw ClosureFailureError("reduced dynamics of an invariant generator is not closed");
    rhs.emplace_back(*r);
  }
  VectorField field = [rhs](double, std::span<const double> y, std::span<double> dy) {
    for (std::size_t i = 0; i < rhs.size(); ++i) dy[i] = rhs[i](y);
  };
  auto traj = integrate_ode(field, invariants(spec, s0), t0, t1, cfg, samples);
  traj.system = spec.name;
  return traj;
}

VectorField first_reconstruction_field(const SystemSpec& spec, unsigned max_degree) {
  const ClosureReport report = verify_closure(spec, max_degree);
  if (!report.pass) throw ClosureFailureError(spec.name + ": closure condition fails");
  std::vector<CompiledPoly> rhs;
  for (const auto& e : report.entries) rhs.emplace_back(*e.expression);
  return [rhs = std::move(rhs)](double, std::span<const double> mu, std::span<double> dmu) {
    for (std::size_t a = 0; a < rhs.size(); ++a) dmu[a] = rhs[a](mu);
  };
}

Trajectory first_reconstruction(const SystemSpec& spec, std::span<const double> mu0, double t0,
                                double t1, const IntegratorConfig& cfg,
                                std::span<const double> samples) {
  if (mu0.size() != spec.momenta.size()) throw DimensionError("mu0 has wrong dimension");
  auto traj = integrate_ode(first_reconstruction_field(spec), mu0, t0, t1, cfg, samples);
  traj.system = spec.name;
  return traj;
}

Trajectory direct_trajectory(const SystemSpec& spec, std::span<const double> s0, double t0,
                             double t1, const IntegratorConfig& cfg,
                             std::span<const double> samples) {
  if (s0.size() != spec.state_dimension()) throw DimensionError("state has wrong dimension");
  auto traj = integrate_ode(hamiltonian_vector_field(spec), s0, t0, t1, cfg, samples);
  traj.system = spec.name;
  return traj;
}

std::vector<double> max_abs_error(const std::vector<std::vector<double>>& a,
                                  const std::vector<std::vector<double>>& b) {
  if (a.size() != b.size() || a.empty()) throw DimensionError("max_abs_error: sample mismatch");
  std::vector<double> err(a.front().size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != err.size() || b[i].size() != err.size()) {
      throw DimensionError("max_abs_error: state dimension mismatch");
    }
    for (std::size_t k = 0; k < err.size(); ++k) err[k] = std::max(err[k], std::abs(a[i][k] - b[i][k]));
  }
  return err;
}

ReconstructionResult moving_line_reconstruction(const SystemSpec& spec,
                                                std::span<const double> s0, double t0, double t1,
                                                const IntegratorConfig& cfg,
                                                std::span<const double> samples) {
  if (!is_planar_se2(spec)) {
    throw std::invalid_argument("moving-line reconstruction needs a planar SE(2) system");
  }
  if (s0.size() != 4) throw DimensionError("state has wrong dimension");
  if (dot2(s0[2], s0[3], s0[2], s0[3]) == 0.0) {
    throw DegenerateMomentumError("moving line undefined: momentum is zero");
  }
  const VectorField mu_field = first_reconstruction_field(spec);
  const VectorField xh = hamiltonian_vector_field(spec);

  // Position on the line and its projected velocity for z = (mu1, mu2, mu3, s).
  struct LinePoint {
    double x, y, ux, uy, projected, arc_rate;
  };
  auto line_point = [&](std::span<const double> z) {
    const double m1 = z[0], m2 = z[1], m3 = z[2], s = z[3];
    const double sigma = m1 * m1 + m2 * m2;
    const double root = std::sqrt(sigma);
    const double ux = m1 / root, uy = m2 / root;
    LinePoint lp{};
    lp.ux = ux;
    lp.uy = uy;
    lp.x = -m3 / sigma * m2 + s * ux;
    lp.y = m3 / sigma * m1 + s * uy;
    double state[4] = {lp.x, lp.y, m1, m2};
    double vel[4];
    xh(0.0, state, vel);
    double dmu[3];
    mu_field(0.0, z.first(3), dmu);
    lp.projected = dot2(ux, uy, vel[0], vel[1]);
    lp.arc_rate = lp.projected + m3 * (m1 * dmu[1] - m2 * dmu[0]) / (sigma * root);
    return lp;
  };

  VectorField field = [&](double t, std::span<const double> z, std::span<double> dz) {
    mu_field(t, z.first(3), dz.first(3));
    const double sigma = z[0] * z[0] + z[1] * z[1];
    if (!(sigma > 0.0)) {
      dz[3] = std::numeric_limits<double>::quiet_NaN();
      return;
    }
    dz[3] = line_point(z).arc_rate;
  };

  const CoalgPoint mu0 = momentum_map(spec, s0);
  const double root0 = std::sqrt(dot2(mu0[0], mu0[1], mu0[0], mu0[1]));
  const double line0 = dot2(s0[0], s0[1], mu0[0] / root0, mu0[1] / root0);
  const std::vector<double> z0{mu0[0], mu0[1], mu0[2], line0};
  const Trajectory aug = integrate_ode(field, z0, t0, t1, cfg, samples);
  if (aug.status != Status::completed) {
    throw std::runtime_error("moving-line integration failed: " + to_string(aug.status));
  }

  ReconstructionResult r;
  r.times = aug.times;
  r.coalgebra.times = aug.times;
  r.coalgebra.config = cfg;
  r.coalgebra.system = spec.name;
  r.phase = r.coalgebra;
  for (const auto& z : aug.states) {
    const LinePoint lp = line_point(z);
    r.coalgebra.states.push_back({z[0], z[1], z[2]});
    r.phase.states.push_back({lp.x, lp.y, z[0], z[1]});
    r.line_parameter.push_back(z[3]);
    r.projected_speed.push_back(lp.projected);
    r.arc_rate.push_back(lp.arc_rate);
  }
  r.reduced = reduced_trajectory(spec, s0, t0, t1, cfg, r.times);
  r.reference = direct_trajectory(spec, s0, t0, t1, cfg, r.times);
  r.max_error = max_abs_error(r.phase.states, r.reference.states);
  return r;
}

Lift canonical_lift(const SystemSpec& spec, std::span<const double> s0, double t0, double t1,
                    const IntegratorConfig& cfg, std::span<const double> samples) {
  require_symplectic(spec);
  const CoalgPoint mu0 = momentum_map(spec, s0);
  const Trajectory mu = first_reconstruction(spec, mu0, t0, t1, cfg, samples);
  if (mu.status != Status::completed) {
    throw std::runtime_error("first reconstruction failed: " + to_string(mu.status));
  }
  const Trajectory red = reduced_trajectory(spec, s0, t0, t1, cfg, mu.times);

  Lift lift;
  lift.times = mu.times;
  lift.momentum = mu.states;
  lift.reduced = red.states;
  if (is_planar_se2(spec)) {
    const double sigma0 = dot2(mu0[0], mu0[1], mu0[0], mu0[1]);
    if (sigma0 == 0.0) throw DegenerateMomentumError("lift undefined: momentum is zero");
    for (const auto& m : mu.states) {
      const double sigma = m[0] * m[0] + m[1] * m[1];
      lift.states.push_back({-m[2] / sigma * m[1], m[2] / sigma * m[0], m[0], m[1]});
    }
    const double root = std::sqrt(sigma0);
    const double s = dot2(s0[0], s0[1], mu0[0] / root, mu0[1] / root);
    lift.g0 = {0.0, s * mu0[0] / root, s * mu0[1] / root};
  } else if (spec.group().name.rfind("R^", 0) == 0) {
    const std::size_t n = static_cast<std::size_t>(spec.n_dof);
    for (const auto& m : mu.states) {
      PhaseState b(2 * n, 0.0);
      for (std::size_t i = 0; i < n; ++i) b[n + i] = m[i];
      lift.states.push_back(std::move(b));
    }
    lift.g0.assign(s0.begin(), s0.begin() + static_cast<long>(n));
  } else {
    throw std::invalid_argument("no canonical lift for group " + spec.group().name);
  }
  return lift;
}

Lift perturb_lift(const SystemSpec& spec, Lift lift, double amount) {
  if (is_planar_se2(spec)) {
    for (auto& b : lift.states) {
      const double root = std::sqrt(b[2] * b[2] + b[3] * b[3]);
      b[0] += amount * (-b[3] / root);
      b[1] += amount * (b[2] / root);
    }
  } else {
    const std::size_t n = static_cast<std::size_t>(spec.n_dof);
    for (auto& b : lift.states)
      for (std::size_t i = 0; i < n; ++i) b[n + i] += amount;
  }
  return lift;
}

SecondReconstructionResult second_reconstruction(const SystemSpec& spec, const Lift& lift,
                                                 const VectorField& field,
                                                 const SecondReconstructionConfig& cfg) {
  require_symplectic(spec);
  const std::size_t n_samples = lift.times.size();
  if (lift.states.size() != n_samples || lift.momentum.size() != n_samples ||
      lift.reduced.size() != n_samples) {
    throw DimensionError("lift components have differing sample counts");
  }
  if (cfg.substeps < 1) throw std::invalid_argument("substeps must be >= 1");
  const GroupAction& action = *spec.action;
  const GroupDescriptor& group = action.descriptor();
  const std::size_t dim = spec.state_dimension();

  SecondReconstructionResult r;
  r.times = lift.times;

  // Lift constraints at the samples.
  for (std::size_t i = 0; i < n_samples; ++i) {
    const CoalgPoint j = momentum_map(spec, lift.states[i]);
    for (std::size_t a = 0; a < j.size(); ++a) {
      r.constraint_residual = std::max(r.constraint_residual, std::abs(j[a] - lift.momentum[i][a]));
    }
    const auto rho = invariants(spec, lift.states[i]);
    for (std::size_t a = 0; a < rho.size(); ++a) {
      r.constraint_residual = std::max(r.constraint_residual, std::abs(rho[a] - lift.reduced[i][a]));
    }
  }
  if (!cfg.restrict_to_isotropy && r.constraint_residual > cfg.residual_tol) {
    throw InconsistentLiftError(r.constraint_residual, cfg.residual_tol);
  }

  const SampledCurve b_curve(lift.times, lift.states);
  const SampledCurve mu_curve(lift.times, lift.momentum);
  std::vector<double> b, db, mu, xh(dim);

  // Algebra velocity xi = g' g^{-1} solving the defining equation at (t, g).
  auto velocity = [&](double t, std::span<const double> g) -> Eigen::VectorXd {
    b_curve.eval(t, b, db);
    const PhaseState c = action.act(g, b);
    field(t, c, xh);
    const auto moved = action.push_forward(g, db);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(dim));
    for (std::size_t k = 0; k < dim; ++k) rhs(static_cast<Eigen::Index>(k)) = xh[k] - moved[k];
    Eigen::MatrixXd A = action.generators(c);
    Eigen::VectorXd xi;
    if (cfg.restrict_to_isotropy) {
      mu_curve.eval(t, mu);
      const auto basis = isotropy_subalgebra(group, mu, cfg.isotropy_tol);
      Eigen::MatrixXd B(group.dimension, static_cast<Eigen::Index>(basis.size()));
      for (std::size_t i = 0; i < basis.size(); ++i) B.col(static_cast<Eigen::Index>(i)) = basis[i];
      const Eigen::MatrixXd AB = A * B;
      xi = B * AB.completeOrthogonalDecomposition().solve(rhs);
    } else {
      xi = A.completeOrthogonalDecomposition().solve(rhs);
    }
    r.equation_residual = std::max(r.equation_residual, (A * xi - rhs).norm());
    return xi;
  };

  std::vector<double> g = lift.g0;
  r.group_curve.push_back(g);
  for (std::size_t i = 0; i + 1 < n_samples; ++i) {
    const double h = (lift.times[i + 1] - lift.times[i]) / static_cast<double>(cfg.substeps);
    for (std::size_t sub = 0; sub < cfg.substeps; ++sub) {
      const double t = lift.times[i] + h * static_cast<double>(sub);
      const Eigen::VectorXd k1 = velocity(t, g);
      Eigen::VectorXd u = 0.5 * h * k1;
      const Eigen::VectorXd k2 = dexp_inverse(group, u, velocity(t + 0.5 * h, action.exp_multiply(u, g)));
      u = 0.5 * h * k2;
      const Eigen::VectorXd k3 = dexp_inverse(group, u, velocity(t + 0.5 * h, action.exp_multiply(u, g)));
      u = h * k3;
      const Eigen::VectorXd k4 = dexp_inverse(group, u, velocity(t + h, action.exp_multiply(u, g)));
      g = action.exp_multiply(h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4), g);
    }
    r.group_curve.push_back(g);
    if (!cfg.restrict_to_isotropy && r.equation_residual > cfg.residual_tol) {
      throw InconsistentLiftError(r.equation_residual, cfg.residual_tol);
    }
  }

  r.phase.times = lift.times;
  r.phase.system = spec.name;
  for (std::size_t i = 0; i < n_samples; ++i) {
    r.phase.states.push_back(action.act(r.group_curve[i], lift.states[i]));
  }
  return r;
}

HamiltonianSplit split_hamiltonian(const SystemSpec& spec) {
  require_symplectic(spec);
  if (spec.invariant_generators.empty()) throw std::invalid_argument("no invariant generator");
  const Poly& sigma = spec.invariant_generators.front();
  const VarLayout& L = spec.hamiltonian.layout();
  Poly kinetic(L);
  for (int i = 0; i < L.n_dof; ++i) kinetic += pow(Poly::p(L, i), 2);
  if (!(sigma == kinetic)) {
    throw std::invalid_argument(spec.name + ": split needs the invariant generator |p|^2");
  }
  HamiltonianSplit split;
  split.invariant_part = Rational(1, 2) * sigma;
  split.collective_part = spec.hamiltonian - split.invariant_part;
  split.commutator = poisson_bracket(split.invariant_part, split.collective_part);
  return split;
}

PhaseState split_flow_reconstruction(const SystemSpec& spec, std::span<const double> s0,
                                     double t, const IntegratorConfig& cfg, SplitOrder order) {
  if (s0.size() != spec.state_dimension()) throw DimensionError("state has wrong dimension");
  const HamiltonianSplit split = split_hamiltonian(spec);
  if (!split.commutes()) {
    throw SplitNotCommutingError(spec.name + ": {h_sigma, h_j} is not zero");
  }
  const std::size_t n = static_cast<std::size_t>(spec.n_dof);
  auto free_flow = [&](PhaseState s) {
    for (std::size_t i = 0; i < n; ++i) s[i] += t * s[n + i];
    return s;
  };

  SystemSpec collective = spec;
  collective.hamiltonian = split.collective_part;
  auto collective_flow = [&](const PhaseState& s) -> PhaseState {
    if (t == 0.0 || split.collective_part.is_zero()) return s;
    const double t1 = std::abs(t);
    VectorField f = hamiltonian_vector_field(collective);
    if (t < 0.0) {
      f = [g = std::move(f)](double tt, std::span<const double> y, std::span<double> dy) {
        g(tt, y, dy);
        for (auto& v : dy) v = -v;
      };
    }
    const Trajectory traj = integrate_ode(f, s, 0.0, t1, cfg);
    if (traj.status != Status::completed) {
      throw std::runtime_error("collective flow failed: " + to_string(traj.status));
    }
    return traj.back();
  };

  const PhaseState start(s0.begin(), s0.end());
  return order == SplitOrder::sigma_then_j ? collective_flow(free_flow(start))
                                           : free_flow(collective_flow(start));
}

Trajectory split_flow_trajectory(const SystemSpec& spec, std::span<const double> s0, double t0,
                                 double t1, const IntegratorConfig& cfg,
                                 std::span<const double> samples) {
  if (s0.size() != spec.state_dimension()) throw DimensionError("state has wrong dimension");
  const HamiltonianSplit split = split_hamiltonian(spec);
  if (!split.commutes()) {
    throw SplitNotCommutingError(spec.name + ": {h_sigma, h_j} is not zero");
  }
  SystemSpec collective = spec;
  collective.hamiltonian = split.collective_part;
  Trajectory traj = integrate_ode(hamiltonian_vector_field(collective), s0, t0, t1, cfg, samples);
  traj.system = spec.name;
  const std::size_t n = static_cast<std::size_t>(spec.n_dof);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double dt = traj.times[k] - t0;
    auto& s = traj.states[k];
    for (std::size_t i = 0; i < n; ++i) s[i] += dt * s[n + i];
  }
  return traj;
}

}  // namespace nqh
