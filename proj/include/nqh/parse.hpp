#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nqh/poly.hpp"

namespace nqh {

/// Names of the variables of a layout, indexed like the layout.
class SymbolTable {
 public:
  SymbolTable() = default;
  SymbolTable(VarLayout layout, std::vector<std::string> names);

  /// q1..qn, p1..pn followed by the given extra names.
  static SymbolTable canonical(int n_dof, std::vector<std::string> extras = {});
  /// x, y, px, py followed by the given extra names.
  static SymbolTable planar(std::vector<std::string> extras = {});
  /// Extra-only layout for generator expressions: params..., J1..Jm.
  static SymbolTable generators(std::size_t m, std::vector<std::string> params = {},
                                std::string stem = "J");

  const VarLayout& layout() const { return layout_; }
  const std::string& name(int var) const { return names_.at(static_cast<std::size_t>(var)); }
  /// Variable index bound to `symbol`, or -1.
  int lookup(std::string_view symbol) const;

 private:
  VarLayout layout_;
  std::vector<std::string> names_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t position, const std::string& what)
      : std::runtime_error(what + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Grammar: rational or decimal literals, bound variable names, + - * /
/// (division only by nonzero constants), ^ with non-negative integer
/// exponents, parentheses. Whitespace is ignored.
Poly parse_poly(std::string_view text, const SymbolTable& symbols);
Poly parse_poly(std::string_view text, int n_dof);

/// Canonical text "c*q1^a*p1^b + ..." with terms in decreasing graded order
/// and rationals printed as num/den.
std::string to_string(const Poly& f, const SymbolTable& symbols);
std::string to_string(const Poly& f);

/// Exact value of a decimal or rational literal such as "0.5", "-3/4", "1e-2".
Rational parse_rational(std::string_view text);

}  // namespace nqh
