#pragma once

#include <array>
#include <optional>
#include <vector>

#include "bbafem/fem.hpp"
#include "bbafem/problem.hpp"

namespace bbafem {

enum class Sign : std::int8_t { negative = -1, zero = 0, positive = 1 };

struct SignRegion {
  std::array<Point2, 3> corners;
  Sign sign;
  double area;
};

/// Element split into sub-triangles on which a linear function has one sign.
struct SignPartition {
  Index element = kNoIndex;
  std::vector<SignRegion> regions;
};

/// Splits the triangle along the zero line of the linear function with the
/// given vertex values. Zero vertices or a zero edge do not split.
std::vector<SignRegion> partition_by_linear(const std::array<Point2, 3>& corners, const std::array<double, 3>& values);

SignPartition sign_partition(const FeFunction& p, Index t);

/// Control induced pointwise by the sign of a piecewise-linear carrier:
/// a where the carrier is positive, b where negative, zero_value on its zero set.
struct BangBangControl {
  ControlBounds bounds;
  FeFunction carrier;
  double zero_value;

  BangBangControl(ControlBounds bounds, FeFunction carrier);
  BangBangControl(ControlBounds bounds, FeFunction carrier, double zero_value);

  double value(Sign s) const;
  double value(double carrier_value) const;
  /// Control value at barycentric coordinates of element t.
  double value_at(Index t, const std::array<double, 3>& bary) const;
};

struct ControlIntegrals {
  std::array<double, 3> moments;  // int_T u phi_i for the local vertices
  double l2sq;                    // int_T u^2
};

ControlIntegrals control_integrals(const BangBangControl& control, Index t);
/// Vertex vector (u, phi_i)_Omega, exact.
std::vector<double> control_load(const BangBangControl& control);
/// ||u1 - u2||_{L1} computed exactly on the common refinement of both sign partitions.
double control_l1_distance(const BangBangControl& u1, const BangBangControl& u2);

enum class InitialControl { midpoint, lower, upper };

struct FixedPointOptions {
  double tol = 1e-10;
  int max_iter = 100;
  /// Relaxation of the sign carrier, in (0, 1]; 1 is plain substitution.
  double damping = 1.0;
  /// Start undamped and, if the observed contraction of the increments is
  /// slower than 1/2, switch once to damping 2 / (2 + rate).
  bool auto_damping = false;
  CgOptions cg;
  InitialControl initial = InitialControl::midpoint;
};

/// Optional warm start, e.g. prolongated from a coarser level.
struct FixedPointGuess {
  std::vector<double> carrier;
  std::vector<double> state;
  std::vector<double> adjoint;
};

struct OcpSolution {
  FeFunction state;
  FeFunction adjoint;
  BangBangControl control;
  int iterations = 0;
  bool converged = false;
  /// State and adjoint stopped changing while the control did not.
  bool non_unique = false;
  std::vector<double> increments;  // L1 control increment per iteration
  std::size_t cg_iterations = 0;
  double damping = 1.0;  // relaxation in effect at return
};

/// Discrete operators of the optimality system on one mesh.
class OptimalitySystem {
 public:
  OptimalitySystem(const ProblemSpec& problem, MeshPtr mesh, const CgOptions& cg = {});

  const MeshPtr& mesh() const { return mesh_; }
  const CsrMatrix& stiffness() const { return stiffness_; }
  const CsrMatrix& mass() const { return mass_; }
  const ProblemSpec& problem() const { return *problem_; }

  /// State for a given control, (grad y, grad v) = (f + u, v).
  FeFunction solve_state(const BangBangControl& control, std::span<const double> guess = {}) const;
  /// Adjoint for a given state, (grad p, grad v) = (y - y_d, v).
  FeFunction solve_adjoint(const FeFunction& state, std::span<const double> guess = {}) const;
  std::size_t last_cg_iterations() const { return solver_.last_iterations(); }

 private:
  const ProblemSpec* problem_;
  MeshPtr mesh_;
  CsrMatrix stiffness_;
  CsrMatrix mass_;
  DirichletSolver solver_;
  std::vector<double> forcing_load_;
  std::vector<double> desired_load_;
};

/// Successive substitution u -> y(u) -> p(y) -> u(sign p), stopped when the
/// L1 control increment falls below tol (b - a) |Omega|.
OcpSolution fixed_point_solve(const ProblemSpec& problem, MeshPtr mesh, const FixedPointOptions& options = {},
                              const FixedPointGuess* guess = nullptr);

}  // namespace bbafem
