#pragma once

// Exact multivariate polynomials over the rationals in canonical
// coordinates (q1..qn, p1..pn), optionally followed by "extra" variables
// that the Poisson bracket treats as constants (model parameters such as k,
// or the generator variables J1..Jm of an expression returned by
// express_in_generators).

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace nqh {

using Rational = mpq_class;

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Variable layout of a polynomial ring: 2n canonical variables followed by
/// `n_extra` passive variables.
struct VarLayout {
  int n_dof = 0;
  int n_extra = 0;

  int n_vars() const { return 2 * n_dof + n_extra; }
  int q(int i) const { return i; }
  int p(int i) const { return n_dof + i; }
  int extra(int i) const { return 2 * n_dof + i; }

  friend bool operator==(const VarLayout&, const VarLayout&) = default;
};

struct Monomial {
  std::vector<std::uint32_t> exponents;

  Monomial() = default;
  explicit Monomial(std::size_t n_vars) : exponents(n_vars, 0) {}
  explicit Monomial(std::vector<std::uint32_t> e) : exponents(std::move(e)) {}

  std::uint32_t degree() const;
  std::size_t size() const { return exponents.size(); }
  std::uint32_t operator[](std::size_t i) const { return exponents[i]; }

  friend bool operator==(const Monomial&, const Monomial&) = default;
};

Monomial operator*(const Monomial& a, const Monomial& b);

/// Graded order: total degree first, then the exponent of the
/// highest-indexed variable (pn, or the last extra) dominates.
struct GradedOrder {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

class Poly {
 public:
  using TermMap = std::map<Monomial, Rational, GradedOrder>;

  Poly() = default;
  explicit Poly(VarLayout layout) : layout_(layout) {}
  Poly(int n_dof, int n_extra) : layout_{n_dof, n_extra} {}

  static Poly constant(VarLayout layout, const Rational& c);
  static Poly variable(VarLayout layout, int index);
  static Poly q(VarLayout layout, int i) { return variable(layout, layout.q(i)); }
  static Poly p(VarLayout layout, int i) { return variable(layout, layout.p(i)); }

  const VarLayout& layout() const { return layout_; }
  int n_dof() const { return layout_.n_dof; }
  int n_vars() const { return layout_.n_vars(); }
  const TermMap& terms() const { return terms_; }

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  Rational constant_term() const;
  Rational coefficient(const Monomial& m) const;
  std::uint32_t total_degree() const;
  /// Largest exponent of variable `var` over all terms.
  std::uint32_t degree_in(int var) const;

  /// Adds c*m to the polynomial, dropping the term if it cancels.
  void add_term(const Monomial& m, const Rational& c);

  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const Rational& c);

  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b);
  friend Poly operator*(Poly a, const Rational& c) { return a *= c; }
  friend Poly operator*(const Rational& c, Poly a) { return a *= c; }
  friend Poly operator-(Poly a) { return a *= Rational(-1); }

  friend bool operator==(const Poly& a, const Poly& b) {
    return a.layout_ == b.layout_ && a.terms_ == b.terms_;
  }

 private:
  VarLayout layout_{};
  TermMap terms_;
};

Poly pow(const Poly& base, unsigned exponent);
Poly partial(const Poly& a, int var);

/// {f,g} = sum_i df/dq_i dg/dp_i - df/dp_i dg/dq_i. Extra variables are constants.
Poly poisson_bracket(const Poly& f, const Poly& g);

/// {f,{g,h}} + {g,{h,f}} + {h,{f,g}}; zero for a correct bracket.
Poly jacobi_identity_residual(const Poly& f, const Poly& g, const Poly& h);

/// Substitutes images[v] for every variable v of `f`. All images share one
/// layout, which becomes the layout of the result.
Poly compose(const Poly& f, std::span<const Poly> images);

/// Replaces all extra variables by the given values; result has no extras.
Poly specialize_extras(const Poly& f, std::span<const Rational> values);

/// Re-embeds a polynomial in a layout with the same n_dof and at least as
/// many extras.
Poly widen(const Poly& f, VarLayout layout);

/// True iff every term is divisible by some momentum variable p_i, i.e. the
/// polynomial lies in the ideal (p1, ..., pn).
bool in_momentum_ideal(const Poly& f);

/// Searches for F of total degree <= max_degree in the generators with
/// target == F(gens...). F lives in layout {0, n_extra + m}: the target's
/// extra variables (parameters) first, then J1..Jm. The parameter degree in F
/// is bounded by the parameter degree of `target`. Returns nullopt if no such
/// F exists.
std::optional<Poly> express_in_generators(const Poly& target,
                                          std::span<const Poly> gens,
                                          unsigned max_degree);

/// Expands F(gens...) for an F produced by express_in_generators.
Poly substitute_generators(const Poly& expr, std::span<const Poly> gens);

double to_double(const Rational& r);
double evaluate(const Poly& f, std::span<const double> values);

/// Double-precision snapshot of a Poly for repeated numerical evaluation.
class CompiledPoly {
 public:
  CompiledPoly() = default;
  explicit CompiledPoly(const Poly& f);

  int n_vars() const { return n_vars_; }
  double operator()(std::span<const double> values) const;

 private:
  int n_vars_ = 0;
  std::vector<double> coeffs_;
  std::vector<std::uint32_t> exps_;  // row-major, n_vars_ per term
};

}  // namespace nqh
