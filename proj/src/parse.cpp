#include "nqh/parse.hpp"

#include <cctype>
#include <sstream>

namespace nqh {

SymbolTable::SymbolTable(VarLayout layout, std::vector<std::string> names)
    : layout_(layout), names_(std::move(names)) {
  if (static_cast<int>(names_.size()) != layout_.n_vars()) {
    throw DimensionError("symbol table size does not match layout");
  }
}

SymbolTable SymbolTable::canonical(int n_dof, std::vector<std::string> extras) {
  std::vector<std::string> names;
  for (int i = 1; i <= n_dof; ++i) names.push_back("q" + std::to_string(i));
  for (int i = 1; i <= n_dof; ++i) names.push_back("p" + std::to_string(i));
  const int e = static_cast<int>(extras.size());
  names.insert(names.end(), extras.begin(), extras.end());
  return SymbolTable({n_dof, e}, std::move(names));
}

SymbolTable SymbolTable::planar(std::vector<std::string> extras) {
  std::vector<std::string> names{"x", "y", "px", "py"};
  const int e = static_cast<int>(extras.size());
  names.insert(names.end(), extras.begin(), extras.end());
  return SymbolTable({2, e}, std::move(names));
}

SymbolTable SymbolTable::generators(std::size_t m, std::vector<std::string> params,
                                    std::string stem) {
  std::vector<std::string> names = std::move(params);
  for (std::size_t i = 1; i <= m; ++i) names.push_back(stem + std::to_string(i));
  const int n = static_cast<int>(names.size());
  return SymbolTable({0, n}, std::move(names));
}

int SymbolTable::lookup(std::string_view symbol) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == symbol) return static_cast<int>(i);
  }
  return -1;
}

Rational parse_rational(std::string_view text) {
  std::size_t i = 0;
  auto fail = [&] { throw ParseError(i, "invalid number '" + std::string(text) + "'"); };
  while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  bool negative = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) negative = text[i++] == '-';

  std::string digits;
  long scale = 0;
  bool any = false;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
    digits += text[i++];
    any = true;
  }
  if (i < text.size() && text[i] == '.') {
    ++i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      digits += text[i++];
      --scale;
      any = true;
    }
  }
  if (!any) fail();
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    bool eneg = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) eneg = text[i++] == '-';
    std::string ed;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ed += text[i++];
    if (ed.empty() || ed.size() > 6) fail();
    scale += eneg ? -std::stol(ed) : std::stol(ed);
  }
  Rational value(mpz_class(digits, 10));
  Rational den(1);
  if (i < text.size() && text[i] == '/') {
    ++i;
    std::string dd;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) dd += text[i++];
    if (dd.empty()) fail();
    den = Rational(mpz_class(dd, 10));
    if (den == 0) throw ParseError(i, "division by zero");
  }
  while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  if (i != text.size()) fail();

  mpz_class ten_pow;
  mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
  if (scale < 0) value /= Rational(ten_pow);
  else value *= Rational(ten_pow);
  value /= den;
  value.canonicalize();
  return negative ? Rational(-value) : value;
}

namespace {

class Parser {
 public:
  Parser(std::string_view text, const SymbolTable& symbols)
      : text_(text), symbols_(symbols), layout_(symbols.layout()) {}

  Poly parse() {
    Poly r = expr();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError(pos_, "unexpected character '" + std::string(1, text_[pos_]) + "'");
    return r;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Poly expr() {
    Poly r = term();
    for (;;) {
      if (accept('+')) r += term();
      else if (accept('-')) r -= term();
      else return r;
    }
  }

  Poly term() {
    Poly r = unary();
    for (;;) {
      if (accept('*')) {
        r = r * unary();
      } else if (accept('/')) {
        const std::size_t at = pos_;
        Poly d = unary();
        if (!d.is_constant()) throw ParseError(at, "division by a non-constant expression");
        const Rational c = d.constant_term();
        if (c == 0) throw ParseError(at, "division by zero");
        r *= Rational(1) / c;
      } else {
        return r;
      }
    }
  }

  Poly unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Poly power() {
    Poly base = atom();
    if (!accept('^')) return base;
    skip_ws();
    const std::size_t at = pos_;
    if (pos_ < text_.size() && text_[pos_] == '-') throw ParseError(at, "negative exponent");
    std::string digits;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) digits += text_[pos_++];
    if (digits.empty()) throw ParseError(at, "expected integer exponent");
    if (digits.size() > 4) throw ParseError(at, "exponent too large");
    return pow(base, static_cast<unsigned>(std::stoul(digits)));
  }

  Poly atom() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError(pos_, "unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Poly r = expr();
      if (!accept(')')) throw ParseError(pos_, "expected ')'");
      return r;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
        ++pos_;
      }
      try {
        return Poly::constant(layout_, parse_rational(text_.substr(start, pos_ - start)));
      } catch (const ParseError&) {
        throw ParseError(start, "invalid number");
      }
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      const auto name = text_.substr(start, pos_ - start);
      const int var = symbols_.lookup(name);
      if (var < 0) throw ParseError(start, "unknown symbol '" + std::string(name) + "'");
      return Poly::variable(layout_, var);
    }
    throw ParseError(pos_, "unexpected character '" + std::string(1, c) + "'");
  }

  std::string_view text_;
  const SymbolTable& symbols_;
  VarLayout layout_;
  std::size_t pos_ = 0;
};

}  // namespace

Poly parse_poly(std::string_view text, const SymbolTable& symbols) {
  return Parser(text, symbols).parse();
}

Poly parse_poly(std::string_view text, int n_dof) {
  return parse_poly(text, SymbolTable::canonical(n_dof));
}

std::string to_string(const Poly& f, const SymbolTable& symbols) {
  if (!(symbols.layout() == f.layout())) {
    throw DimensionError("to_string: symbol table does not match layout");
  }
  if (f.is_zero()) return "0";
  std::ostringstream out;
  bool first = true;
  for (auto it = f.terms().rbegin(); it != f.terms().rend(); ++it) {
    const auto& [m, c] = *it;
    const bool negative = c < 0;
    const Rational mag = negative ? Rational(-c) : c;
    if (first) out << (negative ? "-" : "");
    else out << (negative ? " - " : " + ");
    first = false;

    bool wrote = false;
    if (mag != 1 || m.degree() == 0) {
      out << mag.get_str();
      wrote = true;
    }
    for (std::size_t v = 0; v < m.size(); ++v) {
      if (m[v] == 0) continue;
      if (wrote) out << '*';
      out << symbols.name(static_cast<int>(v));
      if (m[v] > 1) out << '^' << m[v];
      wrote = true;
    }
  }
  return out.str();
}

std::string to_string(const Poly& f) {
  std::vector<std::string> extras;
  for (int i = 1; i <= f.layout().n_extra; ++i) extras.push_back("z" + std::to_string(i));
  return to_string(f, SymbolTable::canonical(f.n_dof(), std::move(extras)));
}

}  // namespace nqh
