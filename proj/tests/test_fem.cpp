#include <cmath>
#include <numbers>
#include <random>

#include "bbafem/fem.hpp"
#include "doctest.h"

using namespace bbafem;

namespace {

constexpr double pi = std::numbers::pi;

MeshPtr square(int n) { return generate_domain(DomainId::unit_square, n); }

}  // namespace

TEST_CASE("local stiffness and mass on the reference triangle") {
  const MeshPtr m = std::make_shared<const TriangleMesh>(TriangleMesh::from_elements({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}}));
  const auto k = assemble_stiffness(*m);
  CHECK(k.at(0, 0) == doctest::Approx(1.0));
  CHECK(k.at(1, 1) == doctest::Approx(0.5));
  CHECK(k.at(0, 1) == doctest::Approx(-0.5));
  CHECK(k.at(1, 2) == doctest::Approx(0.0));
  const auto mm = assemble_mass(*m);
  CHECK(mm.at(0, 0) == doctest::Approx(1.0 / 12.0));
  CHECK(mm.at(0, 1) == doctest::Approx(1.0 / 24.0));
  const auto g = hat_gradients(*m, 0);
  CHECK(g[0].x == doctest::Approx(-1.0));
  CHECK(g[1].x == doctest::Approx(1.0));
  CHECK(g[2].y == doctest::Approx(1.0));
}

TEST_CASE("stiffness and mass are symmetric, stiffness annihilates constants, both SPD after reduction") {
  const auto m = generate_domain(DomainId::lshape_ne, 3);
  const auto k = assemble_stiffness(*m);
  const auto mm = assemble_mass(*m);
  CHECK(k.asymmetry() <= 1e-14);
  CHECK(mm.asymmetry() <= 1e-14);
  const std::vector<double> ones(m->num_vertices(), 1.0);
  for (double r : k.multiply(ones)) CHECK(std::abs(r) <= 1e-12);
  CHECK(dot(ones, mm.multiply(ones)) == doctest::Approx(3.0));

  const DofMap dofs(*m);
  const auto red = reduce_dirichlet(k, std::vector<double>(m->num_vertices(), 0.0), dofs);
  const auto redm = reduce_dirichlet(mm, std::vector<double>(m->num_vertices(), 0.0), dofs);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x(dofs.size());
    for (double& v : x) v = nd(rng);
    CHECK(dot(x, red.matrix.multiply(x)) > 0.0);
    CHECK(dot(x, redm.matrix.multiply(x)) > 0.0);
  }
}

TEST_CASE("dof map covers exactly the interior vertices") {
  const auto m = square(4);
  const DofMap d(*m);
  CHECK(d.size() == 9);
  for (std::size_t v = 0; v < m->num_vertices(); ++v)
    CHECK((d.dof(static_cast<Index>(v)) == kNoIndex) == static_cast<bool>(m->boundary_vertex()[v]));
  std::vector<double> vals(m->num_vertices());
  for (std::size_t v = 0; v < vals.size(); ++v) vals[v] = static_cast<double>(v);
  const auto back = d.extend(d.restrict(vals), m->num_vertices());
  for (std::size_t v = 0; v < vals.size(); ++v) CHECK(back[v] == (m->boundary_vertex()[v] ? 0.0 : vals[v]));
}

TEST_CASE("load vectors") {
  const auto m = square(3);
  const auto l = assemble_load(*m, [](Point2) { return 1.0; }, degree19_rule());
  double s = 0.0;
  for (double v : l) s += v;
  CHECK(s == doctest::Approx(1.0));
  // Linear data: int x phi_i equals the mass matrix applied to the nodal x.
  const auto lx = assemble_load(*m, [](Point2 p) { return p.x; }, degree19_rule());
  std::vector<double> xs;
  for (const auto& p : m->vertices()) xs.push_back(p.x);
  const auto mx = assemble_mass(*m).multiply(xs);
  for (std::size_t i = 0; i < lx.size(); ++i) CHECK(lx[i] == doctest::Approx(mx[i]));
  CHECK_THROWS_AS(assemble_load(*m, [](Point2) { return std::nan(""); }, degree19_rule()), std::domain_error);
}

TEST_CASE("Poisson solver converges at second order in L2 and first in energy") {
  auto exact = [](Point2 p) { return std::sin(pi * p.x) * std::sin(pi * p.y); };
  auto rhs = [&](Point2 p) { return 2.0 * pi * pi * exact(p); };
  std::vector<double> l2, h1;
  for (int n : {4, 8, 16, 32}) {
    const auto m = square(n);
    const auto k = assemble_stiffness(*m);
    const FeFunction u = solve_dirichlet(k, assemble_load(*m, rhs, degree19_rule()), m);
    for (std::size_t v = 0; v < m->num_vertices(); ++v)
      if (m->boundary_vertex()[v]) CHECK(u.coefficients[v] == 0.0);
    double e = 0.0;
    const auto& rule = degree19_rule();
    for (std::size_t t = 0; t < m->num_elements(); ++t) {
      const auto ti = static_cast<Index>(t);
      const auto c = m->corners(ti);
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const double d = exact(QuadratureRule::map(rule.points()[q], c)) - u.evaluate(ti, rule.points()[q]);
        e += m->area(ti) * rule.weights()[q] * d * d;
      }
    }
    l2.push_back(std::sqrt(e));
    // Galerkin orthogonality: |u - u_h|_1^2 = |u|_1^2 - |u_h|_1^2 with |u|_1^2 = pi^2 / 2.
    const double eh = energy_norm(k, u.coefficients);
    h1.push_back(std::sqrt(std::max(0.0, pi * pi / 2.0 - eh * eh)));
  }
  for (std::size_t i = 1; i < l2.size(); ++i) {
    CHECK(std::log2(l2[i - 1] / l2[i]) == doctest::Approx(2.0).epsilon(0.05));
    CHECK(std::log2(h1[i - 1] / h1[i]) == doctest::Approx(1.0).epsilon(0.05));
  }
}

TEST_CASE("FeFunction evaluation, gradient and L2 norm") {
  const auto m = square(2);
  const FeFunction f = FeFunction::interpolate(m, [](Point2 p) { return 1.0 + 2.0 * p.x + 3.0 * p.y; });
  for (std::size_t t = 0; t < m->num_elements(); ++t) {
    const auto ti = static_cast<Index>(t);
    CHECK(f.gradient(ti).x == doctest::Approx(2.0));
    CHECK(f.gradient(ti).y == doctest::Approx(3.0));
    const Point2 c = m->centroid(ti);
    CHECK(f.evaluate(ti, {1.0 / 3, 1.0 / 3, 1.0 / 3}) == doctest::Approx(1.0 + 2.0 * c.x + 3.0 * c.y));
  }
  CHECK(l2_norm(*m, [](Point2) { return 2.0; }, degree19_rule()) == doctest::Approx(2.0));
}
