#pragma once

#include <cassert>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace sl {

/// Largest number of collocation points supported; keeps the Vandermonde system well conditioned.
inline constexpr int kMaxCollocationPoints = 10;

/// Original collocation points xi_k of the standard normal variable together with
/// their probability levels Phi(xi_k).
struct CollocationBasis {
  Eigen::VectorXd xi;
  Eigen::VectorXd levels;

  int size() const { return static_cast<int>(xi.size()); }
};

/// Roots of the degree-M probabilists' Hermite polynomial He_M (the Gauss-Hermite
/// nodes for the weight exp(-x^2/2)), ascending, exactly antisymmetric.
/// Throws std::invalid_argument unless 2 <= M <= 10.
CollocationBasis optimal_collocation_points(int m);

/// He_M(x) by the three-term recurrence He_{n+1} = x He_n - n He_{n-1}.
template <typename Scalar>
Scalar hermite_he(int degree, Scalar x) {
  Scalar prev = Scalar(1);
  if (degree == 0) return prev;
  Scalar cur = x;
  for (int n = 1; n < degree; ++n) {
    const Scalar next = x * cur - Scalar(n) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

/// Horner evaluation of sum_i alpha_i x^i.
template <typename Derived>
typename Derived::Scalar polyval(const Eigen::DenseBase<Derived>& alpha, typename Derived::Scalar x) {
  assert(alpha.size() > 0);
  using Scalar = typename Derived::Scalar;
  Scalar acc = alpha(alpha.size() - 1);
  for (Eigen::Index i = alpha.size() - 2; i >= 0; --i) acc = acc * x + alpha(i);
  return acc;
}

/// Monomial coefficients alpha of the interpolant through (nodes_k, values_k):
/// solves sum_i alpha_i nodes_k^i = values_k with the Bjorck-Pereyra algorithm
/// (Newton divided differences, then conversion to the monomial basis).
template <typename DerivedX, typename DerivedZ>
Eigen::Matrix<typename DerivedZ::Scalar, Eigen::Dynamic, 1> vandermonde_solve(
    const Eigen::MatrixBase<DerivedX>& nodes, const Eigen::MatrixBase<DerivedZ>& values) {
  using Scalar = typename DerivedZ::Scalar;
  const Eigen::Index n = nodes.size();
  if (values.size() != n) throw std::invalid_argument("vandermonde_solve: size mismatch");
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> f = values;
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    for (Eigen::Index i = n - 1; i > k; --i) {
      const Scalar gap = nodes(i) - nodes(i - k - 1);
      assert(gap != Scalar(0) && "vandermonde_solve: duplicate nodes");
      f(i) = (f(i) - f(i - 1)) / gap;
    }
  }
  for (Eigen::Index k = n - 2; k >= 0; --k) {
    for (Eigen::Index i = k; i + 1 < n; ++i) f(i) -= f(i + 1) * nodes(k);
  }
  return f;
}

/// Coefficients of g_M through the pairs (xi_k, z_k).
template <typename Derived>
Eigen::VectorXd lagrange_coefficients(const CollocationBasis& basis, const Eigen::MatrixBase<Derived>& z) {
  if (z.size() != basis.xi.size()) throw std::invalid_argument("lagrange_coefficients: expected M values");
  return vandermonde_solve(basis.xi, z);
}

/// Row-major Vandermonde matrix V(k, i) = nodes_k^i.
Eigen::MatrixXd vandermonde_matrix(const Eigen::VectorXd& nodes);

/// Inverse of the basis' Vandermonde matrix, so that a whole batch of collocation
/// columns maps to coefficient columns with one product: alpha = V^{-1} z.
Eigen::MatrixXd vandermonde_inverse(const CollocationBasis& basis);

/// True when the polynomial sum_i alpha_i x^i is non-decreasing on [lo, hi].
bool is_monotone_on(const Eigen::Ref<const Eigen::VectorXd>& alpha, double lo, double hi);

}  // namespace sl
