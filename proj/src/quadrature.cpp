#include "bbafem/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bbafem {

QuadratureRule::QuadratureRule(std::vector<std::array<double, 3>> barycentric, std::vector<double> weights, int degree)
    : points_(std::move(barycentric)), weights_(std::move(weights)), degree_(degree) {
  if (points_.size() != weights_.size() || points_.empty()) throw std::invalid_argument("malformed quadrature rule");
}

// Golub-Welsch on the Jacobi matrix of the monic Jacobi polynomials.
GaussRule1d gauss_jacobi(int n, double alpha, double beta) {
  if (n < 1) throw std::invalid_argument("gauss_jacobi needs at least one node");
  const double ab = alpha + beta;
  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub(n > 1 ? n - 1 : 1);
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + ab;
    diag[k] = (beta == alpha) ? 0.0 : (beta * beta - alpha * alpha) / (s * (s + 2.0));
  }
  for (int k = 1; k < n; ++k) {
    const double s = 2.0 * k + ab;
    sub[k - 1] = std::sqrt(4.0 * k * (k + alpha) * (k + beta) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0)));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  eig.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::ComputeEigenvectors);
  const double mu0 = std::pow(2.0, ab + 1.0) * std::tgamma(alpha + 1.0) * std::tgamma(beta + 1.0) / std::tgamma(ab + 2.0);

  GaussRule1d rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = eig.eigenvalues()[i];
    const double v0 = eig.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v0 * v0;
  }
  return rule;
}

QuadratureRule conical_product_rule(int degree) {
  if (degree < 0) throw std::invalid_argument("negative quadrature degree");
  const int n = degree / 2 + 1;
  // Collapsed coordinates: x = u, y = (1-u) v with Jacobian (1-u).
  const GaussRule1d outer = gauss_jacobi(n, 1.0, 0.0);
  const GaussRule1d inner = gauss_jacobi(n, 0.0, 0.0);
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  points.reserve(static_cast<std::size_t>(n * n));
  weights.reserve(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i) {
    const double u = 0.5 * (1.0 + outer.nodes[i]);
    for (int j = 0; j < n; ++j) {
      const double v = 0.5 * (1.0 + inner.nodes[j]);
      const double x = u;
      const double y = (1.0 - u) * v;
      points.push_back({1.0 - x - y, x, y});
      // Reference area 1/2 carries weight sum 1/2; barycentric weights sum to 1.
      weights.push_back(outer.weights[i] * inner.weights[j] / 4.0);
    }
  }
  return QuadratureRule(std::move(points), std::move(weights), degree);
}

const QuadratureRule& degree19_rule() {
  static const QuadratureRule rule = conical_product_rule(19);
  return rule;
}

}  // namespace bbafem
