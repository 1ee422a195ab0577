#include "nqh/systems.hpp"

#include <cmath>

namespace nqh {

namespace {

std::vector<Poly> parse_all(const std::vector<std::string>& texts, const SymbolTable& symbols) {
  std::vector<Poly> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(parse_poly(t, symbols));
  return out;
}

std::vector<Poly> specialize_all(const std::vector<Poly>& polys, std::span<const Rational> values) {
  std::vector<Poly> out;
  out.reserve(polys.size());
  for (const auto& p : polys) out.push_back(specialize_extras(p, values));
  return out;
}

void check_bracket_table(const std::string& name, const GroupDescriptor& group,
                         const std::vector<Poly>& momenta) {
  const int m = group.dimension;
  if (static_cast<int>(momenta.size()) != m) {
    throw std::logic_error(name + ": momentum map has " + std::to_string(momenta.size()) +
                           " components for a group of dimension " + std::to_string(m));
  }
  const VarLayout L = momenta.front().layout();
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      Poly expected(L);
      for (int c = 0; c < m; ++c) {
        expected += Rational(group.momentum_bracket_sign) * group.constant(a, b, c) *
                    momenta[static_cast<std::size_t>(c)];
      }
      if (!(poisson_bracket(momenta[static_cast<std::size_t>(a)],
                            momenta[static_cast<std::size_t>(b)]) == expected)) {
        throw std::logic_error(name + ": momentum bracket {j" + std::to_string(a + 1) + ",j" +
                               std::to_string(b + 1) + "} does not match the structure table");
      }
    }
  }
}

const std::vector<std::string> kPlanarMomenta{"px", "py", "y*px - x*py"};

SystemSpec elliptic(const Rational& k) {
  if (!(k > 0 && k < 1)) {
    throw std::domain_error("elliptic: parameter k must lie in (0,1), got " + k.get_str());
  }
  SystemSpec spec;
  spec.name = "elliptic";
  spec.n_dof = 2;
  spec.symbols = SymbolTable::planar();
  spec.action = std::make_shared<Se2CotangentAction>();
  spec.parameters = {{"k", k}};
  spec.invariant_names = {"sigma"};

  SymbolicForms sym;
  sym.parameter_names = {"k"};
  sym.symbols = SymbolTable::planar({"k"});
  sym.hamiltonian = parse_poly(
      "1/2*((1 + k^2/2 + y^2)*px^2 - 2*x*y*px*py + (1 - k^2/2 + x^2)*py^2)", sym.symbols);
  sym.momenta = parse_all(kPlanarMomenta, sym.symbols);
  sym.invariant_generators = {parse_poly("px^2 + py^2", sym.symbols)};

  const std::vector<Rational> values{k};
  spec.hamiltonian = specialize_extras(sym.hamiltonian, values);
  spec.momenta = specialize_all(sym.momenta, values);
  spec.invariant_generators = specialize_all(sym.invariant_generators, values);
  spec.symbolic = std::move(sym);
  return spec;
}

SystemSpec free_particle() {
  SystemSpec spec;
  spec.name = "free-particle";
  spec.n_dof = 2;
  spec.symbols = SymbolTable::planar();
  spec.action = std::make_shared<Se2CotangentAction>();
  spec.hamiltonian = parse_poly("(px^2 + py^2)/2", spec.symbols);
  spec.momenta = parse_all(kPlanarMomenta, spec.symbols);
  spec.invariant_generators = {parse_poly("px^2 + py^2", spec.symbols)};
  spec.invariant_names = {"sigma"};
  return spec;
}

SystemSpec linear_gravity() {
  SystemSpec spec;
  spec.name = "linear-gravity";
  spec.n_dof = 1;
  spec.symbols = SymbolTable({1, 0}, {"q", "p"});
  spec.action = std::make_shared<TranslationAction>(1);
  spec.hamiltonian = parse_poly("p^2/2 + q", spec.symbols);
  spec.momenta = {parse_poly("p", spec.symbols)};
  spec.invariant_generators = {parse_poly("p", spec.symbols)};
  spec.invariant_names = {"sigma"};
  return spec;
}

SystemSpec halfplane_demo() {
  SystemSpec spec;
  spec.name = "halfplane-demo";
  spec.n_dof = 1;
  spec.symplectic = false;
  spec.symbols = SymbolTable({1, 0}, {"x", "y"});
  spec.action = std::make_shared<ScalingAction>();
  spec.hamiltonian = Poly(spec.symbols.layout());
  spec.invariant_generators = {parse_poly("x", spec.symbols)};
  spec.invariant_names = {"sigma"};
  // X = d/dx + y^2 d/dy, group generated by y d/dy.
  spec.raw_field = [](double, std::span<const double> s, std::span<double> ds) {
    ds[0] = 1.0;
    ds[1] = s[1] * s[1];
  };
  spec.reduced_field = [](double, std::span<const double>, std::span<double> ds) { ds[0] = 1.0; };
  return spec;
}

}  // namespace

std::optional<Rational> SystemSpec::parameter(const std::string& key) const {
  for (const auto& [n, v] : parameters) {
    if (n == key) return v;
  }
  return std::nullopt;
}

void SystemSpec::validate() const {
  if (!action) throw std::logic_error(name + ": no group action");
  group().validate();
  if (action->state_dimension() != state_dimension()) {
    throw std::logic_error(name + ": action dimension does not match phase space");
  }
  if (!symplectic) return;
  auto same_layout = [&](const Poly& p) {
    if (!(p.layout() == hamiltonian.layout())) throw std::logic_error(name + ": layout mismatch");
  };
  if (hamiltonian.n_dof() != n_dof) throw std::logic_error(name + ": n_dof mismatch");
  for (const auto& j : momenta) same_layout(j);
  for (const auto& f : invariant_generators) same_layout(f);
  if (symbolic) check_bracket_table(name, group(), symbolic->momenta);
  check_bracket_table(name, group(), momenta);
}

std::vector<std::string> builtin_names() {
  return {"linear-gravity", "elliptic", "free-particle", "halfplane-demo"};
}

SystemSpec builtin(const std::string& name, std::optional<Rational> k) {
  SystemSpec spec;
  if (name == "elliptic") {
    if (!k) throw std::domain_error("elliptic: parameter k is required");
    spec = elliptic(*k);
  } else if (name == "linear-gravity") {
    spec = linear_gravity();
  } else if (name == "free-particle") {
    spec = free_particle();
  } else if (name == "halfplane-demo") {
    spec = halfplane_demo();
  } else {
    throw UnknownSystemError("unknown system '" + name + "'");
  }
  spec.validate();
  return spec;
}

std::vector<Poly> hamiltonian_vector_field_components(const SystemSpec& spec) {
  if (!spec.symplectic) throw NotSymplecticError(spec.name + " is not a Hamiltonian system");
  const VarLayout& L = spec.hamiltonian.layout();
  std::vector<Poly> comps;
  for (int i = 0; i < L.n_dof; ++i) comps.push_back(partial(spec.hamiltonian, L.p(i)));
  for (int i = 0; i < L.n_dof; ++i) comps.push_back(-partial(spec.hamiltonian, L.q(i)));
  return comps;
}

VectorField hamiltonian_vector_field(const SystemSpec& spec) {
  if (!spec.symplectic) return spec.raw_field;
  std::vector<CompiledPoly> comps;
  for (const auto& c : hamiltonian_vector_field_components(spec)) comps.emplace_back(c);
  return [comps = std::move(comps)](double, std::span<const double> s, std::span<double> ds) {
    for (std::size_t i = 0; i < comps.size(); ++i) ds[i] = comps[i](s);
  };
}

std::vector<double> hamiltonian_velocity(const SystemSpec& spec, std::span<const double> s) {
  if (s.size() != spec.state_dimension()) throw DimensionError("state dimension mismatch");
  for (double v : s) {
    if (!std::isfinite(v)) throw std::domain_error("hamiltonian_velocity: non-finite state");
  }
  std::vector<double> ds(s.size());
  hamiltonian_vector_field(spec)(0.0, s, ds);
  return ds;
}

PhaseState act(const SystemSpec& spec, std::span<const double> g, std::span<const double> s) {
  return spec.action->act(g, s);
}

CoalgPoint momentum_map(const SystemSpec& spec, std::span<const double> s) {
  CoalgPoint mu;
  for (const auto& j : spec.momenta) mu.push_back(evaluate(j, s));
  return mu;
}

std::vector<double> invariants(const SystemSpec& spec, std::span<const double> s) {
  std::vector<double> out;
  for (const auto& f : spec.invariant_generators) out.push_back(evaluate(f, s));
  return out;
}

}  // namespace nqh
