#pragma once

// Lie group descriptors and the concrete actions used by the system catalog.

#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nqh/poly.hpp"

namespace nqh {

using PhaseState = std::vector<double>;
using CoalgPoint = std::vector<double>;

struct GroupDescriptor {
  std::string name;
  int dimension = 0;
  /// c[(a*m + b)*m + c] with [e_a, e_b] = sum_c c_ab^c e_c.
  std::vector<Rational> structure;
  /// Matrix realization of the basis, empty when none is used.
  std::vector<Eigen::Matrix3d> basis_matrices;
  /// Matrices of the dual basis f^a with <f^a, e_b> = delta^a_b under
  /// <mu, X> = tr(mu X) / 2.
  std::vector<Eigen::Matrix3d> dual_matrices;
  /// Sign s with {j_a, j_b} = s * j_[e_a, e_b] for the momentum components.
  int momentum_bracket_sign = -1;

  const Rational& constant(int a, int b, int c) const {
    return structure[static_cast<std::size_t>((a * dimension + b) * dimension + c)];
  }
  /// Throws std::logic_error unless the table is antisymmetric and
  /// satisfies the Jacobi identity exactly.
  void validate() const;

  Eigen::VectorXd bracket(const Eigen::VectorXd& xi, const Eigen::VectorXd& eta) const;
  /// Matrix M with (ad*_xi mu)_b = sum_a M(b, a) xi_a, i.e.
  /// <ad*_xi mu, e_b> = <mu, [xi, e_b]>.
  Eigen::MatrixXd coadjoint_matrix(std::span<const double> mu) const;
};

GroupDescriptor se2_descriptor();
GroupDescriptor translation_descriptor(int n);
/// One-dimensional group generated by y d/dy on the half plane.
GroupDescriptor scaling_descriptor();

/// Orthonormal basis of the kernel of xi -> ad*_xi mu; singular values below
/// `tol` count as zero.
std::vector<Eigen::VectorXd> isotropy_subalgebra(const GroupDescriptor& group,
                                                 std::span<const double> mu,
                                                 double tol = 1e-10);

/// Element of SE(2): rotation by theta followed by translation (u, v).
struct Se2Element {
  double theta = 0.0;
  double u = 0.0;
  double v = 0.0;

  static Se2Element identity() { return {}; }
  /// exp(a e1 + b e2 + c e3).
  static Se2Element exp(const Eigen::Vector3d& xi);

  Eigen::Matrix3d matrix() const;
  Eigen::Matrix2d rotation() const;
  Se2Element inverse() const;
  friend Se2Element operator*(const Se2Element& g, const Se2Element& h);
};

/// Lifted action of a group on phase space, in group coordinates. All actions
/// here are affine in the state.
class GroupAction {
 public:
  virtual ~GroupAction() = default;

  virtual const GroupDescriptor& descriptor() const = 0;
  virtual std::size_t state_dimension() const = 0;
  virtual std::vector<double> identity() const = 0;
  virtual PhaseState act(std::span<const double> g, std::span<const double> s) const = 0;
  /// Tangent map D phi_g applied to a state-space vector.
  virtual std::vector<double> push_forward(std::span<const double> g,
                                           std::span<const double> v) const = 0;
  /// Column a is the infinitesimal generator (e_a)_P at s.
  virtual Eigen::MatrixXd generators(std::span<const double> s) const = 0;
  /// Coordinates of exp(xi) * g.
  virtual std::vector<double> exp_multiply(const Eigen::VectorXd& xi,
                                           std::span<const double> g) const = 0;
  virtual std::vector<double> random_element(std::mt19937_64& rng) const = 0;
};

/// SE(2) on T*R^2 = (x, y, px, py); group coordinates (theta, u, v).
class Se2CotangentAction final : public GroupAction {
 public:
  Se2CotangentAction();

  const GroupDescriptor& descriptor() const override { return descriptor_; }
  std::size_t state_dimension() const override { return 4; }
  std::vector<double> identity() const override { return {0.0, 0.0, 0.0}; }
  PhaseState act(std::span<const double> g, std::span<const double> s) const override;
  std::vector<double> push_forward(std::span<const double> g,
                                   std::span<const double> v) const override;
  Eigen::MatrixXd generators(std::span<const double> s) const override;
  std::vector<double> exp_multiply(const Eigen::VectorXd& xi,
                                   std::span<const double> g) const override;
  std::vector<double> random_element(std::mt19937_64& rng) const override;

  static Se2Element element(std::span<const double> g);
  static PhaseState act(const Se2Element& g, std::span<const double> s);

 private:
  GroupDescriptor descriptor_;
};

/// R^n acting on T*R^n by q -> q + a.
class TranslationAction final : public GroupAction {
 public:
  explicit TranslationAction(int n);

  const GroupDescriptor& descriptor() const override { return descriptor_; }
  std::size_t state_dimension() const override { return 2 * static_cast<std::size_t>(n_); }
  std::vector<double> identity() const override;
  PhaseState act(std::span<const double> g, std::span<const double> s) const override;
  std::vector<double> push_forward(std::span<const double> g,
                                   std::span<const double> v) const override;
  Eigen::MatrixXd generators(std::span<const double> s) const override;
  std::vector<double> exp_multiply(const Eigen::VectorXd& xi,
                                   std::span<const double> g) const override;
  std::vector<double> random_element(std::mt19937_64& rng) const override;

 private:
  int n_;
  GroupDescriptor descriptor_;
};

/// (x, y) -> (x, e^a y) on the half plane y > 0.
class ScalingAction final : public GroupAction {
 public:
  ScalingAction();

  const GroupDescriptor& descriptor() const override { return descriptor_; }
  std::size_t state_dimension() const override { return 2; }
  std::vector<double> identity() const override { return {0.0}; }
  PhaseState act(std::span<const double> g, std::span<const double> s) const override;
  std::vector<double> push_forward(std::span<const double> g,
                                   std::span<const double> v) const override;
  Eigen::MatrixXd generators(std::span<const double> s) const override;
  std::vector<double> exp_multiply(const Eigen::VectorXd& xi,
                                   std::span<const double> g) const override;
  std::vector<double> random_element(std::mt19937_64& rng) const override;

 private:
  GroupDescriptor descriptor_;
};

}  // namespace nqh
