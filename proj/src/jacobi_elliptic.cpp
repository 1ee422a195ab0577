#include "nqh/jacobi_elliptic.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace nqh {

namespace {

constexpr int kMaxAgmIterations = 32;
constexpr double kAgmThreshold = 1e-16;

}  // namespace

EllipticModulus::EllipticModulus(double k) : k_(k), kp_(0.0) {
  if (!std::isfinite(k) || k < 0.0 || k >= 1.0) {
    throw std::domain_error("elliptic modulus must satisfy 0 <= k < 1, got " + std::to_string(k));
  }
  kp_ = std::sqrt((1.0 - k) * (1.0 + k));
}

double complete_K(EllipticModulus k) {
  double a = 1.0;
  double b = k.complementary();
  for (int n = 0; n < kMaxAgmIterations && std::abs(a - b) > kAgmThreshold * a; ++n) {
    const double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
  }
  return std::numbers::pi / (2.0 * a);
}

JacobiTriple jacobi_elliptic(double t, EllipticModulus k) {
  if (!std::isfinite(t)) throw std::domain_error("jacobi_elliptic: non-finite argument");
  if (k.k() == 0.0) return {std::sin(t), std::cos(t), 1.0};

  const double period = 4.0 * complete_K(k);
  const double u = t - period * std::nearbyint(t / period);

  std::array<double, kMaxAgmIterations + 1> a{}, c{};
  a[0] = 1.0;
  c[0] = k.k();
  double b = k.complementary();
  int n = 0;
  while (n < kMaxAgmIterations && std::abs(c[n]) > kAgmThreshold) {
    a[n + 1] = 0.5 * (a[n] + b);
    c[n + 1] = 0.5 * (a[n] - b);
    b = std::sqrt(a[n] * b);
    ++n;
  }

  double phi = std::ldexp(a[n] * u, n);
  for (int j = n; j > 0; --j) {
    phi = 0.5 * (phi + std::asin(c[j] / a[j] * std::sin(phi)));
  }
  const double s = std::sin(phi);
  const double kk = k.k() * k.k();
  return {s, std::cos(phi), std::sqrt(1.0 - kk * s * s)};
}

double sn(double t, EllipticModulus k) { return jacobi_elliptic(t, k).sn; }
double cn(double t, EllipticModulus k) { return jacobi_elliptic(t, k).cn; }
double dn(double t, EllipticModulus k) { return jacobi_elliptic(t, k).dn; }

}  // namespace nqh
