#include "bbafem/fem.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bbafem {

FeFunction FeFunction::zero(MeshPtr mesh) {
  const std::size_t n = mesh->num_vertices();
  return {std::move(mesh), std::vector<double>(n, 0.0)};
}

FeFunction FeFunction::interpolate(MeshPtr mesh, const ScalarField& g) {
  std::vector<double> c(mesh->num_vertices());
  for (std::size_t v = 0; v < c.size(); ++v) c[v] = g(mesh->vertex(static_cast<Index>(v)));
  return {std::move(mesh), std::move(c)};
}

std::array<double, 3> FeFunction::local(Index t) const {
  const auto& tri = mesh->elements()[t];
  return {coefficients[tri[0]], coefficients[tri[1]], coefficients[tri[2]]};
}

double FeFunction::evaluate(Index t, const std::array<double, 3>& bary) const {
  const auto c = local(t);
  return bary[0] * c[0] + bary[1] * c[1] + bary[2] * c[2];
}

Point2 FeFunction::gradient(Index t) const {
  const auto g = hat_gradients(*mesh, t);
  const auto c = local(t);
  return c[0] * g[0] + c[1] * g[1] + c[2] * g[2];
}

std::array<Point2, 3> hat_gradients(const TriangleMesh& mesh, Index t) {
  const auto c = mesh.corners(t);
  const double twice_area = 2.0 * mesh.area(t);
  std::array<Point2, 3> g;
  for (int k = 0; k < 3; ++k) {
    // Opposite edge rotated inward, scaled by 1/(2|T|).
    const Point2 d = c[(k + 2) % 3] - c[(k + 1) % 3];
    g[k] = {-d.y / twice_area, d.x / twice_area};
  }
  return g;
}

DofMap::DofMap(const TriangleMesh& mesh) : vertex_dof_(mesh.num_vertices(), kNoIndex) {
  const auto& boundary = mesh.boundary_vertex();
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    if (boundary[v]) continue;
    vertex_dof_[v] = static_cast<Index>(dof_vertex_.size());
    dof_vertex_.push_back(static_cast<Index>(v));
  }
}

std::vector<double> DofMap::restrict(std::span<const double> vertex_values) const {
  std::vector<double> out(dof_vertex_.size());
  for (std::size_t d = 0; d < out.size(); ++d) out[d] = vertex_values[dof_vertex_[d]];
  return out;
}

std::vector<double> DofMap::extend(std::span<const double> dof_values, std::size_t num_vertices) const {
  std::vector<double> out(num_vertices, 0.0);
  for (std::size_t d = 0; d < dof_values.size(); ++d) out[dof_vertex_[d]] = dof_values[d];
  return out;
}

CsrMatrix assemble_stiffness(const TriangleMesh& mesh) {
  std::vector<Triplet> trip;
  trip.reserve(9 * mesh.num_elements());
  for (std::size_t t = 0; t < mesh.num_elements(); ++t) {
    const auto ti = static_cast<Index>(t);
    const auto g = hat_gradients(mesh, ti);
    const double area = mesh.area(ti);
    const auto& tri = mesh.elements()[t];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) trip.push_back({tri[i], tri[j], area * dot(g[i], g[j])});
  }
  return CsrMatrix::from_triplets(mesh.num_vertices(), mesh.num_vertices(), std::move(trip));
}

CsrMatrix assemble_mass(const TriangleMesh& mesh) {
  std::vector<Triplet> trip;
  trip.reserve(9 * mesh.num_elements());
  for (std::size_t t = 0; t < mesh.num_elements(); ++t) {
    const double s = mesh.area(static_cast<Index>(t)) / 12.0;
    const auto& tri = mesh.elements()[t];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) trip.push_back({tri[i], tri[j], i == j ? 2.0 * s : s});
  }
  return CsrMatrix::from_triplets(mesh.num_vertices(), mesh.num_vertices(), std::move(trip));
}

std::vector<double> assemble_load(const TriangleMesh& mesh, const ScalarField& g, const QuadratureRule& rule) {
  std::vector<double> load(mesh.num_vertices(), 0.0);
  const auto pts = rule.points();
  const auto wts = rule.weights();
  for (std::size_t t = 0; t < mesh.num_elements(); ++t) {
    const auto ti = static_cast<Index>(t);
    const auto c = mesh.corners(ti);
    std::array<double, 3> local{0.0, 0.0, 0.0};
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double value = g(QuadratureRule::map(pts[q], c));
      if (!std::isfinite(value)) throw std::domain_error("load integrand is not finite in element " + std::to_string(t));
      for (int i = 0; i < 3; ++i) local[i] += wts[q] * value * pts[q][i];
    }
    const double area = mesh.area(ti);
    const auto& tri = mesh.elements()[t];
    for (int i = 0; i < 3; ++i) load[tri[i]] += area * local[i];
  }
  return load;
}

SparseSpdSystem reduce_dirichlet(const CsrMatrix& full, std::span<const double> load, const DofMap& dofs) {
  std::vector<Triplet> trip;
  trip.reserve(full.nonzeros());
  const auto rp = full.row_ptr();
  const auto ci = full.col_idx();
  const auto va = full.values();
  for (std::size_t d = 0; d < dofs.size(); ++d) {
    const Index v = dofs.vertex(static_cast<Index>(d));
    for (std::size_t k = rp[v]; k < rp[v + 1]; ++k) {
      const Index col = dofs.dof(ci[k]);
      if (col != kNoIndex) trip.push_back({static_cast<Index>(d), col, va[k]});
    }
  }
  SparseSpdSystem sys;
  sys.matrix = CsrMatrix::from_triplets(dofs.size(), dofs.size(), std::move(trip));
  sys.rhs = load.empty() ? std::vector<double>(dofs.size(), 0.0) : dofs.restrict(load);
  return sys;
}

DirichletSolver::DirichletSolver(MeshPtr mesh, const CsrMatrix& stiffness, CgOptions options)
    : mesh_(std::move(mesh)), dofs_(*mesh_), options_(options) {
  reduced_ = reduce_dirichlet(stiffness, {}, dofs_).matrix;
}

FeFunction DirichletSolver::solve(std::span<const double> load, std::span<const double> guess) const {
  if (load.size() != mesh_->num_vertices()) throw std::invalid_argument("load vector length does not match the mesh");
  const std::vector<double> rhs = dofs_.restrict(load);
  std::vector<double> x = guess.empty() ? std::vector<double>(rhs.size(), 0.0) : dofs_.restrict(guess);
  last_iterations_ = pcg(reduced_, rhs, x, options_).iterations;
  return {mesh_, dofs_.extend(x, mesh_->num_vertices())};
}

FeFunction solve_dirichlet(const CsrMatrix& stiffness, std::span<const double> load, MeshPtr mesh, const CgOptions& options) {
  if (stiffness.rows() != mesh->num_vertices()) throw std::invalid_argument("stiffness matrix does not match the mesh");
  const DirichletSolver solver(mesh, stiffness, options);
  return solver.solve(load);
}

double l2_norm(const TriangleMesh& mesh, const ScalarField& g, const QuadratureRule& rule) {
  double sum = 0.0;
  for (std::size_t t = 0; t < mesh.num_elements(); ++t)
    sum += rule.integrate(mesh.corners(static_cast<Index>(t)), [&](Point2 x) {
      const double v = g(x);
      return v * v;
    });
  return std::sqrt(sum);
}

double energy_norm(const CsrMatrix& stiffness, std::span<const double> v) {
  const auto kv = stiffness.multiply(v);
  return std::sqrt(std::max(0.0, dot(v, kv)));
}

}  // namespace bbafem
