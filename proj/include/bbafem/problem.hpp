#pragma once

#include <optional>
#include <string>

#include "bbafem/fem.hpp"

namespace bbafem {

/// Box constraints a <= u <= b.
struct ControlBounds {
  double lower = -1.0;
  double upper = 1.0;

  ControlBounds() = default;
  ControlBounds(double a, double b);
  double width() const { return upper - lower; }
  double midpoint() const { return 0.5 * (lower + upper); }
};

struct ExactSolution {
  ScalarField state;
  std::function<Point2(Point2)> state_gradient;
  ScalarField adjoint;
  ScalarField control;
};

/// Data of one optimal control benchmark: minimise 1/2 ||y - y_d||^2 subject
/// to -Laplace y = f + u, y = 0 on the boundary, u between the bounds.
struct ProblemSpec {
  std::string name;
  DomainId domain = DomainId::unit_square;
  ControlBounds bounds;
  ScalarField forcing;
  ScalarField desired_state;
  std::optional<ExactSolution> exact;
};

}  // namespace bbafem
