#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "bbafem/mesh.hpp"
#include "bbafem/quadrature.hpp"
#include "bbafem/sparse.hpp"

namespace bbafem {

using ScalarField = std::function<double(Point2)>;

/// Continuous piecewise-linear function given by its vertex values.
struct FeFunction {
  MeshPtr mesh;
  std::vector<double> coefficients;

  static FeFunction zero(MeshPtr mesh);
  /// Nodal interpolant of g.
  static FeFunction interpolate(MeshPtr mesh, const ScalarField& g);

  std::array<double, 3> local(Index t) const;
  /// Value at barycentric coordinates on element t.
  double evaluate(Index t, const std::array<double, 3>& bary) const;
  /// Constant gradient on element t.
  Point2 gradient(Index t) const;
};

/// Gradients of the three P1 hat functions on element t.
std::array<Point2, 3> hat_gradients(const TriangleMesh& mesh, Index t);

/// Maps interior vertices to unknowns of the homogeneous Dirichlet space.
class DofMap {
 public:
  explicit DofMap(const TriangleMesh& mesh);
  std::size_t size() const { return dof_vertex_.size(); }
  Index dof(Index vertex) const { return vertex_dof_[vertex]; }
  Index vertex(Index dof) const { return dof_vertex_[dof]; }
  std::vector<double> restrict(std::span<const double> vertex_values) const;
  std::vector<double> extend(std::span<const double> dof_values, std::size_t num_vertices) const;

 private:
  std::vector<Index> vertex_dof_;
  std::vector<Index> dof_vertex_;
};

/// Full vertex-by-vertex stiffness matrix sum_T int_T grad phi_i . grad phi_j.
CsrMatrix assemble_stiffness(const TriangleMesh& mesh);
/// Full P1 mass matrix with local blocks |T|/12 [[2,1,1],[1,2,1],[1,1,2]].
CsrMatrix assemble_mass(const TriangleMesh& mesh);
/// Load vector int g phi_i by quadrature; throws if g is non-finite at a node.
std::vector<double> assemble_load(const TriangleMesh& mesh, const ScalarField& g, const QuadratureRule& rule);

/// Row/column elimination of boundary vertices.
SparseSpdSystem reduce_dirichlet(const CsrMatrix& full, std::span<const double> load, const DofMap& dofs);

/// Reusable reduced stiffness solver for repeated right-hand sides.
class DirichletSolver {
 public:
  DirichletSolver(MeshPtr mesh, const CsrMatrix& stiffness, CgOptions options = {});

  /// Solves with a full-length load vector; `guess` (if non-empty) is a
  /// full-length initial iterate. Boundary coefficients are exactly zero.
  FeFunction solve(std::span<const double> load, std::span<const double> guess = {}) const;
  const DofMap& dofs() const { return dofs_; }
  const CsrMatrix& reduced() const { return reduced_; }
  std::size_t last_iterations() const { return last_iterations_; }

 private:
  MeshPtr mesh_;
  DofMap dofs_;
  CsrMatrix reduced_;
  CgOptions options_;
  mutable std::size_t last_iterations_ = 0;
};

FeFunction solve_dirichlet(const CsrMatrix& stiffness, std::span<const double> load, MeshPtr mesh,
                           const CgOptions& options = {});

/// sqrt(sum_T int_T g^2) by quadrature.
double l2_norm(const TriangleMesh& mesh, const ScalarField& g, const QuadratureRule& rule);
/// Energy seminorm sqrt(v^T K v) of a vertex field.
double energy_norm(const CsrMatrix& stiffness, std::span<const double> v);

}  // namespace bbafem
