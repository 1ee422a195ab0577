#pragma once

#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nqh/integrate.hpp"
#include "nqh/lie_group.hpp"
#include "nqh/parse.hpp"
#include "nqh/poly.hpp"

namespace nqh {

struct UnknownSystemError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NotSymplecticError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Polynomial data with model parameters kept as extra variables, e.g. the
/// elliptic Hamiltonian with symbolic k.
struct SymbolicForms {
  std::vector<std::string> parameter_names;
  SymbolTable symbols;
  Poly hamiltonian;
  std::vector<Poly> momenta;
  std::vector<Poly> invariant_generators;
};

/// A system with symmetry. For symplectic systems the polynomials live in
/// layout {n_dof, 0} with every parameter replaced by its exact value.
struct SystemSpec {
  std::string name;
  int n_dof = 0;
  bool symplectic = true;
  SymbolTable symbols;
  Poly hamiltonian;
  std::vector<Poly> momenta;
  std::vector<Poly> invariant_generators;
  std::vector<std::string> invariant_names;
  std::shared_ptr<const GroupAction> action;
  std::vector<std::pair<std::string, Rational>> parameters;
  std::optional<SymbolicForms> symbolic;

  /// Non-symplectic systems only: the raw field and its reduction to the
  /// invariant coordinates.
  VectorField raw_field;
  VectorField reduced_field;

  const GroupDescriptor& group() const { return action->descriptor(); }
  std::size_t state_dimension() const { return 2 * static_cast<std::size_t>(n_dof); }
  std::optional<Rational> parameter(const std::string& key) const;

  /// Exact check of {j_a, j_b} = sign * sum_c c_ab^c j_c (symbolic forms if
  /// present, then the specialized ones). Throws std::logic_error on failure.
  void validate() const;
};

/// Names accepted by builtin().
std::vector<std::string> builtin_names();

/// linear-gravity, elliptic (needs k in (0,1)), free-particle, halfplane-demo.
SystemSpec builtin(const std::string& name, std::optional<Rational> k = std::nullopt);

/// X_h as a field on R^{2n}: q' = dh/dp, p' = -dh/dq. For non-symplectic
/// systems the raw field is returned.
VectorField hamiltonian_vector_field(const SystemSpec& spec);

/// X_h at one state; throws std::domain_error on non-finite input.
std::vector<double> hamiltonian_velocity(const SystemSpec& spec, std::span<const double> s);

/// Exact components (dh/dp_i, -dh/dq_i) of X_h.
std::vector<Poly> hamiltonian_vector_field_components(const SystemSpec& spec);

PhaseState act(const SystemSpec& spec, std::span<const double> g, std::span<const double> s);

CoalgPoint momentum_map(const SystemSpec& spec, std::span<const double> s);
std::vector<double> invariants(const SystemSpec& spec, std::span<const double> s);

}  // namespace nqh
