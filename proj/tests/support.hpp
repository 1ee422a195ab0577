#pragma once

#include <random>

#include "nqh/poly.hpp"

namespace nqh::testing {

// Random polynomial with small integer-over-small-integer coefficients.
inline Poly random_poly(std::mt19937_64& rng, VarLayout L, int terms, int max_exp) {
  std::uniform_int_distribution<int> coef(-5, 5), den(1, 4), ex(0, max_exp);
  Poly f(L);
  for (int t = 0; t < terms; ++t) {
    Monomial m(static_cast<std::size_t>(L.n_vars()));
    for (auto& e : m.exponents) e = static_cast<std::uint32_t>(ex(rng));
    f.add_term(m, Rational(coef(rng), den(rng)));
  }
  return f;
}

inline std::vector<double> random_point(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace nqh::testing
