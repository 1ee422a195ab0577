#include "nqh/poly.hpp"

#include <algorithm>
#include <numeric>

namespace nqh {

namespace {

void require_same_layout(const Poly& a, const Poly& b, const char* what) {
  if (!(a.layout() == b.layout())) {
    throw DimensionError(std::string(what) + ": polynomial layouts differ");
  }
}

// Exponent vectors of `n` variables with total degree <= max_degree.
void enumerate_exponents(std::size_t n, unsigned max_degree,
                         std::vector<std::vector<std::uint32_t>>& out) {
  std::vector<std::uint32_t> cur(n, 0);
  auto rec = [&](auto&& self, std::size_t i, unsigned left) -> void {
    if (i == n) {
      out.push_back(cur);
      return;
    }
    for (unsigned e = 0; e <= left; ++e) {
      cur[i] = e;
      self(self, i + 1, left - e);
    }
    cur[i] = 0;
  };
  rec(rec, 0, max_degree);
}

// Exponent vectors with cur[i] <= bounds[i].
void enumerate_boxed(std::span<const std::uint32_t> bounds,
                     std::vector<std::vector<std::uint32_t>>& out) {
  std::vector<std::uint32_t> cur(bounds.size(), 0);
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == bounds.size()) {
      out.push_back(cur);
      return;
    }
    for (std::uint32_t e = 0; e <= bounds[i]; ++e) {
      cur[i] = e;
      self(self, i + 1);
    }
    cur[i] = 0;
  };
  rec(rec, 0);
}

}  // namespace

std::uint32_t Monomial::degree() const {
  return std::accumulate(exponents.begin(), exponents.end(), std::uint32_t{0});
}

Monomial operator*(const Monomial& a, const Monomial& b) {
  if (a.size() != b.size()) throw DimensionError("monomial length mismatch");
  Monomial r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r.exponents[i] = a[i] + b[i];
  return r;
}

bool GradedOrder::operator()(const Monomial& a, const Monomial& b) const {
  const auto da = a.degree(), db = b.degree();
  if (da != db) return da < db;
  for (std::size_t i = a.size(); i-- > 0;) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

Poly Poly::constant(VarLayout layout, const Rational& c) {
  Poly r(layout);
  r.add_term(Monomial(layout.n_vars()), c);
  return r;
}

Poly Poly::variable(VarLayout layout, int index) {
  if (index < 0 || index >= layout.n_vars()) {
    throw DimensionError("variable index out of range");
  }
  Monomial m(layout.n_vars());
  m.exponents[index] = 1;
  Poly r(layout);
  r.add_term(m, Rational(1));
  return r;
}

bool Poly::is_constant() const {
  return terms_.empty() ||
         (terms_.size() == 1 && terms_.begin()->first.degree() == 0);
}

Rational Poly::constant_term() const {
  return coefficient(Monomial(n_vars()));
}

Rational Poly::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Rational(0) : it->second;
}

std::uint32_t Poly::total_degree() const {
  // Graded order: the last term has the largest degree.
  return terms_.empty() ? 0 : terms_.rbegin()->first.degree();
}

std::uint32_t Poly::degree_in(int var) const {
  std::uint32_t d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m[var]);
  return d;
}

void Poly::add_term(const Monomial& m, const Rational& c) {
  if (static_cast<int>(m.size()) != n_vars()) {
    throw DimensionError("monomial length does not match layout");
  }
  // GMP arithmetic assumes canonical operands; Rational(a, b) is not reduced.
  Rational v = c;
  v.canonicalize();
  if (v == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, v);
  if (!inserted) {
    it->second += v;
    if (it->second == 0) terms_.erase(it);
  }
}

Poly& Poly::operator+=(const Poly& o) {
  require_same_layout(*this, o, "add");
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  require_same_layout(*this, o, "subtract");
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Poly& Poly::operator*=(const Rational& c) {
  Rational v = c;
  v.canonicalize();
  if (v == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, coeff] : terms_) coeff *= v;
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
  require_same_layout(a, b, "multiply");
  Poly r(a.layout());
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) r.add_term(ma * mb, ca * cb);
  }
  return r;
}

Poly pow(const Poly& base, unsigned exponent) {
  Poly result = Poly::constant(base.layout(), Rational(1));
  Poly sq = base;
  while (exponent > 0) {
    if (exponent & 1u) result = result * sq;
    exponent >>= 1;
    if (exponent > 0) sq = sq * sq;
  }
  return result;
}

Poly partial(const Poly& a, int var) {
  if (var < 0 || var >= a.n_vars()) {
    throw DimensionError("partial: variable index out of range");
  }
  Poly r(a.layout());
  for (const auto& [m, c] : a.terms()) {
    const auto e = m[var];
    if (e == 0) continue;
    Monomial d = m;
    d.exponents[var] = e - 1;
    r.add_term(d, c * Rational(e));
  }
  return r;
}

Poly poisson_bracket(const Poly& f, const Poly& g) {
  require_same_layout(f, g, "poisson_bracket");
  const VarLayout& L = f.layout();
  Poly r(L);
  for (int i = 0; i < L.n_dof; ++i) {
    r += partial(f, L.q(i)) * partial(g, L.p(i));
    r -= partial(f, L.p(i)) * partial(g, L.q(i));
  }
  return r;
}

Poly jacobi_identity_residual(const Poly& f, const Poly& g, const Poly& h) {
  return poisson_bracket(f, poisson_bracket(g, h)) +
         poisson_bracket(g, poisson_bracket(h, f)) +
         poisson_bracket(h, poisson_bracket(f, g));
}

Poly compose(const Poly& f, std::span<const Poly> images) {
  if (static_cast<int>(images.size()) != f.n_vars()) {
    throw DimensionError("compose: need one image per variable");
  }
  if (images.empty()) return f;
  const VarLayout target = images.front().layout();
  for (const auto& im : images) {
    if (!(im.layout() == target)) {
      throw DimensionError("compose: images have differing layouts");
    }
  }
  // Cache powers of each image lazily.
  std::vector<std::vector<Poly>> powers(images.size());
  auto power_of = [&](std::size_t v, std::uint32_t e) -> const Poly& {
    auto& cache = powers[v];
    if (cache.empty()) cache.push_back(Poly::constant(target, Rational(1)));
    while (cache.size() <= e) cache.push_back(cache.back() * images[v]);
    return cache[e];
  };
  Poly r(target);
  for (const auto& [m, c] : f.terms()) {
    Poly term = Poly::constant(target, c);
    for (std::size_t v = 0; v < m.size(); ++v) {
      if (m[v] != 0) term = term * power_of(v, m[v]);
    }
    r += term;
  }
  return r;
}

Poly specialize_extras(const Poly& f, std::span<const Rational> values) {
  const VarLayout& L = f.layout();
  if (static_cast<int>(values.size()) != L.n_extra) {
    throw DimensionError("specialize_extras: wrong number of values");
  }
  const VarLayout out{L.n_dof, 0};
  std::vector<Poly> images;
  images.reserve(L.n_vars());
  for (int v = 0; v < 2 * L.n_dof; ++v) images.push_back(Poly::variable(out, v));
  for (const auto& val : values) images.push_back(Poly::constant(out, val));
  return compose(f, images);
}

Poly widen(const Poly& f, VarLayout layout) {
  const VarLayout& L = f.layout();
  if (layout.n_dof != L.n_dof || layout.n_extra < L.n_extra) {
    throw DimensionError("widen: incompatible layouts");
  }
  Poly r(layout);
  for (const auto& [m, c] : f.terms()) {
    Monomial w(layout.n_vars());
    std::copy(m.exponents.begin(), m.exponents.end(), w.exponents.begin());
    r.add_term(w, c);
  }
  return r;
}

bool in_momentum_ideal(const Poly& f) {
  const VarLayout& L = f.layout();
  for (const auto& [m, c] : f.terms()) {
    bool divisible = false;
    for (int i = 0; i < L.n_dof && !divisible; ++i) divisible = m[L.p(i)] > 0;
    if (!divisible) return false;
  }
  return true;
}

std::optional<Poly> express_in_generators(const Poly& target,
                                          std::span<const Poly> gens,
                                          unsigned max_degree) {
  if (max_degree < 1) throw std::invalid_argument("max_degree must be >= 1");
  for (const auto& g : gens) require_same_layout(target, g, "express_in_generators");

  const VarLayout& L = target.layout();
  const std::size_t m = gens.size();
  const std::size_t e = static_cast<std::size_t>(L.n_extra);
  const VarLayout out{0, static_cast<int>(e + m)};

  std::vector<std::uint32_t> param_bounds(e);
  for (std::size_t j = 0; j < e; ++j) param_bounds[j] = target.degree_in(L.extra(static_cast<int>(j)));

  std::vector<std::vector<std::uint32_t>> gen_exps, param_exps;
  enumerate_exponents(m, max_degree, gen_exps);
  enumerate_boxed(param_bounds, param_exps);

  std::vector<Poly> images;
  for (std::size_t j = 0; j < e; ++j) images.push_back(Poly::variable(L, L.extra(static_cast<int>(j))));
  for (const auto& g : gens) images.push_back(g);

  // Candidate monomials of F and their expansions in canonical variables.
  std::vector<Monomial> columns;
  std::vector<Poly> expansions;
  for (const auto& pe : param_exps) {
    for (const auto& ge : gen_exps) {
      Monomial mono(out.n_vars());
      std::copy(pe.begin(), pe.end(), mono.exponents.begin());
      std::copy(ge.begin(), ge.end(), mono.exponents.begin() + static_cast<long>(e));
      Poly unit(out);
      unit.add_term(mono, Rational(1));
      expansions.push_back(compose(unit, images));
      columns.push_back(std::move(mono));
    }
  }

  // Row index per canonical monomial appearing anywhere.
  std::map<Monomial, std::size_t, GradedOrder> row_of;
  auto row_index = [&](const Monomial& mono) {
    auto [it, inserted] = row_of.try_emplace(mono, row_of.size());
    return it->second;
  };
  for (const auto& ex : expansions)
    for (const auto& [mono, c] : ex.terms()) row_index(mono);
  for (const auto& [mono, c] : target.terms()) row_index(mono);

  const std::size_t rows = row_of.size();
  const std::size_t cols = columns.size();
  std::vector<std::vector<Rational>> a(rows, std::vector<Rational>(cols + 1, Rational(0)));
  for (std::size_t j = 0; j < cols; ++j)
    for (const auto& [mono, c] : expansions[j].terms()) a[row_of.at(mono)][j] = c;
  for (const auto& [mono, c] : target.terms()) a[row_of.at(mono)][cols] = c;

  // Exact Gauss-Jordan elimination.
  std::vector<std::size_t> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && a[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(a[piv], a[r]);
    const Rational inv = Rational(1) / a[r][c];
    for (std::size_t k = c; k <= cols; ++k) a[r][k] *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0) continue;
      const Rational factor = a[i][c];
      for (std::size_t k = c; k <= cols; ++k) {
        if (a[r][k] != 0) a[i][k] -= factor * a[r][k];
      }
    }
    pivot_col.push_back(c);
    ++r;
  }
  for (std::size_t i = r; i < rows; ++i) {
    if (a[i][cols] != 0) return std::nullopt;
  }

  Poly F(out);
  for (std::size_t i = 0; i < pivot_col.size(); ++i) F.add_term(columns[pivot_col[i]], a[i][cols]);
  return F;
}

Poly substitute_generators(const Poly& expr, std::span<const Poly> gens) {
  if (gens.empty()) throw DimensionError("substitute_generators: no generators");
  const VarLayout& L = gens.front().layout();
  const int e = L.n_extra;
  if (expr.layout().n_dof != 0 || expr.layout().n_extra != e + static_cast<int>(gens.size())) {
    throw DimensionError("substitute_generators: expression layout mismatch");
  }
  std::vector<Poly> images;
  for (int j = 0; j < e; ++j) images.push_back(Poly::variable(L, L.extra(j)));
  images.insert(images.end(), gens.begin(), gens.end());
  return compose(expr, images);
}

double to_double(const Rational& r) { return r.get_d(); }

double evaluate(const Poly& f, std::span<const double> values) {
  return CompiledPoly(f)(values);
}

CompiledPoly::CompiledPoly(const Poly& f) : n_vars_(f.n_vars()) {
  for (const auto& [m, c] : f.terms()) {
    coeffs_.push_back(to_double(c));
    exps_.insert(exps_.end(), m.exponents.begin(), m.exponents.end());
  }
}

double CompiledPoly::operator()(std::span<const double> values) const {
  if (static_cast<int>(values.size()) != n_vars_) {
    throw DimensionError("evaluate: wrong number of values");
  }
  double sum = 0.0;
  const std::uint32_t* e = exps_.data();
  for (double c : coeffs_) {
    double t = c;
    for (int v = 0; v < n_vars_; ++v, ++e) {
      for (std::uint32_t k = 0; k < *e; ++k) t *= values[v];
    }
    sum += t;
  }
  return sum;
}

}  // namespace nqh
