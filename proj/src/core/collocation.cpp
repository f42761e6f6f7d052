#include "sevenleague/core/collocation.hpp"

#include <algorithm>
#include <vector>

#include "sevenleague/core/normal.hpp"

namespace sl {

CollocationBasis optimal_collocation_points(int m) {
  if (m < 2 || m > kMaxCollocationPoints) {
    throw std::invalid_argument("optimal_collocation_points: M must lie in [2, 10]");
  }
  // Golub-Welsch: the monic recurrence of He_n gives a Jacobi matrix with zero
  // diagonal and off-diagonal sqrt(n).
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(m, m);
  for (int n = 1; n < m; ++n) {
    jacobi(n - 1, n) = std::sqrt(static_cast<double>(n));
    jacobi(n, n - 1) = jacobi(n - 1, n);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi, Eigen::EigenvaluesOnly);
  Eigen::VectorXd roots = solver.eigenvalues();
  std::sort(roots.begin(), roots.end());

  // Newton polish on He_M in extended precision, using He_M' = M He_{M-1}, so each
  // root rounds to the nearest double.
  std::vector<long double> polished(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    long double x = roots[k];
    for (int it = 0; it < 4; ++it) x -= hermite_he(m, x) / (m * hermite_he(m - 1, x));
    polished[static_cast<std::size_t>(k)] = x;
  }

  CollocationBasis basis;
  basis.xi.resize(m);
  for (int k = 0; k < m; ++k) {
    basis.xi[k] = static_cast<double>(0.5L * (polished[static_cast<std::size_t>(k)] -
                                              polished[static_cast<std::size_t>(m - 1 - k)]));
  }
  if (m % 2 == 1) basis.xi[m / 2] = 0.0;
  basis.levels = basis.xi.unaryExpr([](double x) { return std_normal_cdf(x); });
  return basis;
}

Eigen::MatrixXd vandermonde_matrix(const Eigen::VectorXd& nodes) {
  const Eigen::Index n = nodes.size();
  Eigen::MatrixXd v(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    double power = 1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      v(k, i) = power;
      power *= nodes[k];
    }
  }
  return v;
}

Eigen::MatrixXd vandermonde_inverse(const CollocationBasis& basis) {
  return vandermonde_matrix(basis.xi).fullPivLu().inverse();
}

bool is_monotone_on(const Eigen::Ref<const Eigen::VectorXd>& alpha, double lo, double hi) {
  const Eigen::Index n = alpha.size();
  if (n <= 1) return true;
  Eigen::VectorXd deriv(n - 1);
  for (Eigen::Index i = 1; i < n; ++i) deriv[i - 1] = static_cast<double>(i) * alpha[i];

  // Derivative of degree <= 2: its minimum on [lo, hi] is at an endpoint or the vertex.
  if (deriv.size() <= 3) {
    double worst = std::min(polyval(deriv, lo), polyval(deriv, hi));
    if (deriv.size() == 3 && deriv[2] > 0) {
      const double vertex = -deriv[1] / (2 * deriv[2]);
      if (vertex > lo && vertex < hi) worst = std::min(worst, polyval(deriv, vertex));
    }
    return worst >= 0;
  }
  constexpr int kScan = 256;
  for (int j = 0; j <= kScan; ++j) {
    const double x = lo + (hi - lo) * j / kScan;
    if (polyval(deriv, x) < 0) return false;
  }
  return true;
}

}  // namespace sl
