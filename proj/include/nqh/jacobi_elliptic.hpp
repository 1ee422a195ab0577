#pragma once

#include <stdexcept>

namespace nqh {

/// Elliptic modulus k with 0 <= k < 1.
class EllipticModulus {
 public:
  explicit EllipticModulus(double k);

  double k() const { return k_; }
  /// k' = sqrt(1 - k^2)
  double complementary() const { return kp_; }

 private:
  double k_;
  double kp_;
};

struct JacobiTriple {
  double sn;
  double cn;
  double dn;
};

/// sn, cn, dn by the descending Landen / AGM scheme. The argument is first
/// reduced modulo 4K. Accurate to ~1e-13 for |t| <= 100, k <= 0.99; larger k
/// loses accuracy gradually.
JacobiTriple jacobi_elliptic(double t, EllipticModulus k);

double sn(double t, EllipticModulus k);
double cn(double t, EllipticModulus k);
double dn(double t, EllipticModulus k);

/// Complete elliptic integral of the first kind, pi / (2 AGM(1, k')).
double complete_K(EllipticModulus k);

}  // namespace nqh
