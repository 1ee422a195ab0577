#pragma once

// Reduction and reconstruction for systems whose momenta close under the
// Hamiltonian flow: {j_a, h} = f_a(j).

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "nqh/integrate.hpp"
#include "nqh/systems.hpp"

namespace nqh {

struct NotInvariantError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ClosureFailureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateMomentumError : std::domain_error {
  using std::domain_error::domain_error;
};

struct SplitNotCommutingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class InconsistentLiftError : public std::runtime_error {
 public:
  InconsistentLiftError(double residual, double threshold);
  double residual() const { return residual_; }

 private:
  double residual_;
};

struct ClosureEntry {
  std::size_t index = 0;  // zero-based generator index a
  Poly bracket;           // {j_a, h}
  /// f_a in layout {0, m}: J1..Jm.
  std::optional<Poly> expression;
  /// Same with the system parameters kept symbolic: layout {0, n_params + m}.
  std::optional<Poly> symbolic_bracket;
  std::optional<Poly> symbolic_expression;

  bool ok() const { return expression.has_value(); }
};

struct ClosureReport {
  std::vector<ClosureEntry> entries;
  bool pass = false;
  SymbolTable generator_symbols;
  std::optional<SymbolTable> symbolic_generator_symbols;
};

ClosureReport verify_closure(const SystemSpec& spec, unsigned max_degree = 4);

struct DescentReport {
  std::size_t samples = 0;
  /// max |(X_h f)(g.s) - (X_h f)(s)| / max(1, |.|, |.|)
  double max_relative_deviation = 0.0;
  Poly derivative;  // X_h f = {f, h}
};

/// Exact pre-check {f, j_a} = 0 for all a (NotInvariantError otherwise), then
/// random sampling of group elements and states.
DescentReport verify_invariant_descent(const SystemSpec& spec, const Poly& f,
                                       std::size_t n_samples, std::uint64_t seed = 20240601);

/// {f, h} expressed in the invariant generators (layout {0, number of
/// generators}), or nullopt.
std::optional<Poly> reduced_dynamics(const SystemSpec& spec, const Poly& f,
                                     unsigned max_degree = 4);

/// Integrates the reduced equations d sigma_i/dt = {sigma_i, h} on the
/// invariant generators from their values at s0.
Trajectory reduced_trajectory(const SystemSpec& spec, std::span<const double> s0, double t0,
                              double t1, const IntegratorConfig& cfg,
                              std::span<const double> samples = {});

/// The field mu' = f(mu) on the dual algebra; throws ClosureFailureError when
/// the closure check fails.
VectorField first_reconstruction_field(const SystemSpec& spec, unsigned max_degree = 4);

Trajectory first_reconstruction(const SystemSpec& spec, std::span<const double> mu0, double t0,
                                double t1, const IntegratorConfig& cfg,
                                std::span<const double> samples = {});

/// Direct integration of X_h, the reference every reconstruction is compared to.
Trajectory direct_trajectory(const SystemSpec& spec, std::span<const double> s0, double t0,
                             double t1, const IntegratorConfig& cfg,
                             std::span<const double> samples = {});

/// Maximum absolute difference per coordinate over matching samples.
std::vector<double> max_abs_error(const std::vector<std::vector<double>>& a,
                                  const std::vector<std::vector<double>>& b);

struct ReconstructionResult {
  std::vector<double> times;
  Trajectory reduced;    // invariant generators
  Trajectory coalgebra;  // mu(t)
  Trajectory phase;      // reconstructed c(t)
  Trajectory reference;  // direct integration of X_h
  std::vector<double> max_error;

  // Moving-line data; empty for other methods.
  std::vector<double> line_parameter;   // s(t) = <q, u>
  std::vector<double> projected_speed;  // <u, pi_* X_h>
  std::vector<double> arc_rate;         // ds/dt
};

/// SE(2) planar systems only. q(t) = q0(t) + s(t) u(t) with
/// q0 = (mu3 / sigma)(-mu2, mu1) and u = (mu1, mu2) / sqrt(sigma); s obeys
/// ds/dt = <u, pi_* X_h> + mu3 (mu1 mu2' - mu2 mu1') / sigma^(3/2), the second
/// term accounting for the rotation of the line.
ReconstructionResult moving_line_reconstruction(const SystemSpec& spec,
                                                std::span<const double> s0, double t0, double t1,
                                                const IntegratorConfig& cfg,
                                                std::span<const double> samples);

/// A sampled curve b(t) with rho(b) = reduced(t) and j(b) = momentum(t),
/// plus the group element g0 with phi(g0, b(0)) = c(0).
struct Lift {
  std::vector<double> times;
  std::vector<PhaseState> states;
  std::vector<CoalgPoint> momentum;
  std::vector<std::vector<double>> reduced;
  std::vector<double> g0;
};

/// SE(2): b(t) = (q0(t), mu1, mu2), the nearest point of the moving line.
/// Translations: b(t) = (0, mu).
Lift canonical_lift(const SystemSpec& spec, std::span<const double> s0, double t0, double t1,
                    const IntegratorConfig& cfg, std::span<const double> samples);

/// Test hook: displaces the lift positions by `amount` along the normal of the
/// moving line (SE(2)) or shifts the momenta (translations).
Lift perturb_lift(const SystemSpec& spec, Lift lift, double amount);

struct SecondReconstructionConfig {
  std::size_t substeps = 1;
  double residual_tol = 1e-6;
  /// Solve only within the isotropy algebra of mu(t); reports the residual
  /// instead of rejecting the lift.
  bool restrict_to_isotropy = false;
  double isotropy_tol = 1e-8;
};

struct SecondReconstructionResult {
  std::vector<double> times;
  std::vector<std::vector<double>> group_curve;
  Trajectory phase;
  double equation_residual = 0.0;    // |D1 phi g' + D2 phi b' - X_h|
  double constraint_residual = 0.0;  // |j(b) - mu|, |rho(b) - rho_bar|
};

/// Solves D1 phi(g,b) g' + D2 phi(g,b) b' = X_h(phi(g,b)) for g(t) by
/// least squares over the algebra (minimal norm) with Runge-Kutta-Munthe-Kaas
/// steps on the group. Throws InconsistentLiftError when a residual exceeds
/// cfg.residual_tol (not in restricted mode).
SecondReconstructionResult second_reconstruction(const SystemSpec& spec, const Lift& lift,
                                                 const VectorField& field,
                                                 const SecondReconstructionConfig& cfg = {});

enum class SplitOrder { sigma_then_j, j_then_sigma };

struct HamiltonianSplit {
  Poly invariant_part;   // h_sigma = sigma / 2
  Poly collective_part;  // h_j = h - h_sigma
  Poly commutator;       // {h_sigma, h_j}
  bool commutes() const { return commutator.is_zero(); }
};

/// Requires the first invariant generator to be |p|^2.
HamiltonianSplit split_hamiltonian(const SystemSpec& spec);

/// Composes the exact free flow of h_sigma with the integrated flow of h_j.
/// Throws SplitNotCommutingError if {h_sigma, h_j} != 0.
PhaseState split_flow_reconstruction(const SystemSpec& spec, std::span<const double> s0,
                                     double t, const IntegratorConfig& cfg,
                                     SplitOrder order = SplitOrder::sigma_then_j);

/// Samples of the split-flow composite at every sample time, using one
/// integration of the h_j flow followed by the exact h_sigma flow.
Trajectory split_flow_trajectory(const SystemSpec& spec, std::span<const double> s0, double t0,
                                 double t1, const IntegratorConfig& cfg,
                                 std::span<const double> samples);

}  // namespace nqh
