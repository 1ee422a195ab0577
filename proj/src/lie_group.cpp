#include "nqh/lie_group.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nqh {

namespace {

void require_size(std::span<const double> v, std::size_t n, const char* what) {
  if (v.size() != n) throw DimensionError(std::string(what) + ": dimension mismatch");
}

GroupDescriptor abelian(std::string name, int m) {
  GroupDescriptor d;
  d.name = std::move(name);
  d.dimension = m;
  d.structure.assign(static_cast<std::size_t>(m * m * m), Rational(0));
  return d;
}

}  // namespace

void GroupDescriptor::validate() const {
  const int m = dimension;
  if (static_cast<int>(structure.size()) != m * m * m) {
    throw std::logic_error(name + ": structure table has wrong size");
  }
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c)
        if (constant(a, b, c) != -constant(b, a, c)) {
          throw std::logic_error(name + ": structure table is not antisymmetric");
        }
  // sum_d c_ab^d c_dc^e + c_bc^d c_da^e + c_ca^d c_db^e = 0
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c)
        for (int e = 0; e < m; ++e) {
          Rational s(0);
          for (int d = 0; d < m; ++d) {
            s += constant(a, b, d) * constant(d, c, e) + constant(b, c, d) * constant(d, a, e) +
                 constant(c, a, d) * constant(d, b, e);
          }
          if (s != 0) throw std::logic_error(name + ": structure table violates Jacobi");
        }
}

Eigen::VectorXd GroupDescriptor::bracket(const Eigen::VectorXd& xi,
                                         const Eigen::VectorXd& eta) const {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(dimension);
  for (int a = 0; a < dimension; ++a)
    for (int b = 0; b < dimension; ++b) {
      const double w = xi(a) * eta(b);
      if (w == 0.0) continue;
      for (int c = 0; c < dimension; ++c) r(c) += w * constant(a, b, c).get_d();
    }
  return r;
}

Eigen::MatrixXd GroupDescriptor::coadjoint_matrix(std::span<const double> mu) const {
  require_size(mu, static_cast<std::size_t>(dimension), "coadjoint_matrix");
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dimension, dimension);
  for (int a = 0; a < dimension; ++a)
    for (int b = 0; b < dimension; ++b)
      for (int c = 0; c < dimension; ++c) M(b, a) += constant(a, b, c).get_d() * mu[c];
  return M;
}

GroupDescriptor se2_descriptor() {
  GroupDescriptor d = abelian("SE(2)", 3);
  auto set = [&](int a, int b, int c, int value) {
    d.structure[static_cast<std::size_t>((a * 3 + b) * 3 + c)] = value;
    d.structure[static_cast<std::size_t>((b * 3 + a) * 3 + c)] = -value;
  };
  // [e3, e1] = e2, [e3, e2] = -e1, [e1, e2] = 0
  set(2, 0, 1, 1);
  set(2, 1, 0, -1);

  Eigen::Matrix3d e1 = Eigen::Matrix3d::Zero(), e2 = e1, e3 = e1;
  e1(0, 2) = 1.0;
  e2(1, 2) = 1.0;
  e3(0, 1) = -1.0;
  e3(1, 0) = 1.0;
  d.basis_matrices = {e1, e2, e3};
  d.dual_matrices = {2.0 * e1.transpose(), 2.0 * e2.transpose(), e3.transpose()};
  d.momentum_bracket_sign = -1;
  return d;
}

GroupDescriptor translation_descriptor(int n) {
  return abelian("R^" + std::to_string(n), n);
}

GroupDescriptor scaling_descriptor() { return abelian("R (y-scaling)", 1); }

std::vector<Eigen::VectorXd> isotropy_subalgebra(const GroupDescriptor& group,
                                                 std::span<const double> mu, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("isotropy_subalgebra: tol must be positive");
  const Eigen::MatrixXd M = group.coadjoint_matrix(mu);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  std::vector<Eigen::VectorXd> basis;
  for (int i = 0; i < group.dimension; ++i) {
    if (sv(i) < tol) basis.emplace_back(svd.matrixV().col(i));
  }
  return basis;
}

Se2Element Se2Element::exp(const Eigen::Vector3d& xi) {
  const double a = xi(0), b = xi(1), c = xi(2);
  double s_over_c, one_minus_cos_over_c;
  if (std::abs(c) < 1e-6) {
    const double c2 = c * c;
    s_over_c = 1.0 - c2 / 6.0 + c2 * c2 / 120.0;
    one_minus_cos_over_c = c / 2.0 - c * c2 / 24.0;
  } else {
    s_over_c = std::sin(c) / c;
    one_minus_cos_over_c = (1.0 - std::cos(c)) / c;
  }
  return {c, s_over_c * a - one_minus_cos_over_c * b, one_minus_cos_over_c * a + s_over_c * b};
}

Eigen::Matrix2d Se2Element::rotation() const {
  const double c = std::cos(theta), s = std::sin(theta);
  Eigen::Matrix2d R;
  R << c, -s, s, c;
  return R;
}

Eigen::Matrix3d Se2Element::matrix() const {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  m.topLeftCorner<2, 2>() = rotation();
  m(0, 2) = u;
  m(1, 2) = v;
  return m;
}

Se2Element Se2Element::inverse() const {
  const Eigen::Vector2d t = -(rotation().transpose() * Eigen::Vector2d(u, v));
  return {-theta, t(0), t(1)};
}

Se2Element operator*(const Se2Element& g, const Se2Element& h) {
  const Eigen::Vector2d t = g.rotation() * Eigen::Vector2d(h.u, h.v) + Eigen::Vector2d(g.u, g.v);
  return {g.theta + h.theta, t(0), t(1)};
}

Se2CotangentAction::Se2CotangentAction() : descriptor_(se2_descriptor()) {}

Se2Element Se2CotangentAction::element(std::span<const double> g) {
  require_size(g, 3, "SE(2) element");
  return {g[0], g[1], g[2]};
}

PhaseState Se2CotangentAction::act(const Se2Element& g, std::span<const double> s) {
  require_size(s, 4, "SE(2) act");
  const Eigen::Matrix2d R = g.rotation();
  const Eigen::Vector2d q = R * Eigen::Vector2d(s[0], s[1]) + Eigen::Vector2d(g.u, g.v);
  const Eigen::Vector2d p = R * Eigen::Vector2d(s[2], s[3]);
  return {q(0), q(1), p(0), p(1)};
}

PhaseState Se2CotangentAction::act(std::span<const double> g, std::span<const double> s) const {
  return act(element(g), s);
}

std::vector<double> Se2CotangentAction::push_forward(std::span<const double> g,
                                                     std::span<const double> v) const {
  require_size(v, 4, "SE(2) push_forward");
  const Eigen::Matrix2d R = element(g).rotation();
  const Eigen::Vector2d dq = R * Eigen::Vector2d(v[0], v[1]);
  const Eigen::Vector2d dp = R * Eigen::Vector2d(v[2], v[3]);
  return {dq(0), dq(1), dp(0), dp(1)};
}

Eigen::MatrixXd Se2CotangentAction::generators(std::span<const double> s) const {
  require_size(s, 4, "SE(2) generators");
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(4, 3);
  A(0, 0) = 1.0;
  A(1, 1) = 1.0;
  A(0, 2) = -s[1];
  A(1, 2) = s[0];
  A(2, 2) = -s[3];
  A(3, 2) = s[2];
  return A;
}

std::vector<double> Se2CotangentAction::exp_multiply(const Eigen::VectorXd& xi,
                                                     std::span<const double> g) const {
  const Se2Element r = Se2Element::exp(Eigen::Vector3d(xi(0), xi(1), xi(2))) * element(g);
  return {r.theta, r.u, r.v};
}

std::vector<double> Se2CotangentAction::random_element(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> shift(-2.0, 2.0);
  return {angle(rng), shift(rng), shift(rng)};
}

TranslationAction::TranslationAction(int n) : n_(n), descriptor_(translation_descriptor(n)) {
  if (n < 1) throw std::invalid_argument("TranslationAction: n must be positive");
}

std::vector<double> TranslationAction::identity() const {
  return std::vector<double>(static_cast<std::size_t>(n_), 0.0);
}

PhaseState TranslationAction::act(std::span<const double> g, std::span<const double> s) const {
  require_size(g, static_cast<std::size_t>(n_), "translation element");
  require_size(s, state_dimension(), "translation act");
  PhaseState r(s.begin(), s.end());
  for (int i = 0; i < n_; ++i) r[static_cast<std::size_t>(i)] += g[static_cast<std::size_t>(i)];
  return r;
}

std::vector<double> TranslationAction::push_forward(std::span<const double>,
                                                    std::span<const double> v) const {
  require_size(v, state_dimension(), "translation push_forward");
  return {v.begin(), v.end()};
}

Eigen::MatrixXd TranslationAction::generators(std::span<const double> s) const {
  require_size(s, state_dimension(), "translation generators");
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * n_, n_);
  for (int i = 0; i < n_; ++i) A(i, i) = 1.0;
  return A;
}

std::vector<double> TranslationAction::exp_multiply(const Eigen::VectorXd& xi,
                                                    std::span<const double> g) const {
  std::vector<double> r(g.begin(), g.end());
  for (int i = 0; i < n_; ++i) r[static_cast<std::size_t>(i)] += xi(i);
  return r;
}

std::vector<double> TranslationAction::random_element(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> shift(-2.0, 2.0);
  std::vector<double> g(static_cast<std::size_t>(n_));
  for (auto& a : g) a = shift(rng);
  return g;
}

ScalingAction::ScalingAction() : descriptor_(scaling_descriptor()) {}

PhaseState ScalingAction::act(std::span<const double> g, std::span<const double> s) const {
  require_size(g, 1, "scaling element");
  require_size(s, 2, "scaling act");
  return {s[0], std::exp(g[0]) * s[1]};
}

std::vector<double> ScalingAction::push_forward(std::span<const double> g,
                                                std::span<const double> v) const {
  require_size(v, 2, "scaling push_forward");
  return {v[0], std::exp(g[0]) * v[1]};
}

Eigen::MatrixXd ScalingAction::generators(std::span<const double> s) const {
  require_size(s, 2, "scaling generators");
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, 1);
  A(1, 0) = s[1];
  return A;
}

std::vector<double> ScalingAction::exp_multiply(const Eigen::VectorXd& xi,
                                                std::span<const double> g) const {
  return {g[0] + xi(0)};
}

std::vector<double> ScalingAction::random_element(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> a(-1.0, 1.0);
  return {a(rng)};
}

}  // namespace nqh
