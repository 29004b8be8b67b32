#pragma once

#include <array>
#include <span>
#include <vector>

#include "bbafem/mesh.hpp"

namespace bbafem {

/// Quadrature on a triangle in barycentric form. Weights sum to one, so the
/// integral over T is |T| * sum_q w_q g(x_q).
class QuadratureRule {
 public:
  QuadratureRule(std::vector<std::array<double, 3>> barycentric, std::vector<double> weights, int degree);

  std::span<const std::array<double, 3>> points() const { return points_; }
  std::span<const double> weights() const { return weights_; }
  std::size_t size() const { return weights_.size(); }
  int degree() const { return degree_; }

  /// Maps quadrature point q onto the triangle with the given corners.
  static Point2 map(const std::array<double, 3>& bary, const std::array<Point2, 3>& corners) {
    return bary[0] * corners[0] + bary[1] * corners[1] + bary[2] * corners[2];
  }

  /// Integral of g over the triangle with the given corners.
  template <class F>
  double integrate(const std::array<Point2, 3>& corners, F&& g) const {
    const double area = std::abs(signed_area(corners[0], corners[1], corners[2]));
    double sum = 0.0;
    for (std::size_t q = 0; q < weights_.size(); ++q) sum += weights_[q] * g(map(points_[q], corners));
    return area * sum;
  }

 private:
  std::vector<std::array<double, 3>> points_;
  std::vector<double> weights_;
  int degree_;
};

/// Gauss nodes and weights on [-1, 1] for the weight (1-x)^alpha (1+x)^beta.
struct GaussRule1d {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule1d gauss_jacobi(int n, double alpha, double beta);

/// Conical-product (collapsed Gauss) rule exact for total degree `degree`.
/// All points are interior and all weights positive.
QuadratureRule conical_product_rule(int degree);

/// Shared degree-19 rule used for loads, errors and indicators.
const QuadratureRule& degree19_rule();

}  // namespace bbafem
