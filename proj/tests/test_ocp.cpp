#include <cmath>
#include <random>

#include "bbafem/benchmarks.hpp"
#include "bbafem/ocp.hpp"
#include "doctest.h"

using namespace bbafem;

namespace {

const std::array<Point2, 3> kRef{Point2{0, 0}, Point2{1, 0}, Point2{0, 1}};

double region_area(const std::vector<SignRegion>& regions, Sign s) {
  double a = 0.0;
  for (const auto& r : regions)
    if (r.sign == s) a += r.area;
  return a;
}

MeshPtr single_triangle() {
  return std::make_shared<const TriangleMesh>(TriangleMesh::from_elements({kRef[0], kRef[1], kRef[2]}, {{0, 1, 2}}));
}

// Brute-force L1 distance by sampling sub-triangle centroids.
double sampled_l1(const BangBangControl& u1, const BangBangControl& u2, int m) {
  const TriangleMesh& mesh = *u1.carrier.mesh;
  double s = 0.0;
  for (std::size_t t = 0; t < mesh.num_elements(); ++t) {
    const auto ti = static_cast<Index>(t);
    const double a = mesh.area(ti) / (m * m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; i + j < m; ++j)
        for (int up = 0; up < 2; ++up) {
          if (up && i + j + 1 >= m) continue;
          const double l1 = (i + (up ? 2.0 : 1.0) / 3.0) / m, l2 = (j + (up ? 2.0 : 1.0) / 3.0) / m;
          const std::array<double, 3> b{1.0 - l1 - l2, l1, l2};
          s += a * std::abs(u1.value_at(ti, b) - u2.value_at(ti, b));
        }
  }
  return s;
}

}  // namespace

TEST_CASE("sign partition area identities") {
  // Lone negative vertex: the zero line cuts both adjacent edges at their
  // midpoints, leaving a quarter of the triangle.
  const auto r = partition_by_linear(kRef, {-1.0, 1.0, 1.0});
  CHECK(r.size() == 3);
  CHECK(region_area(r, Sign::negative) == doctest::Approx(0.125));
  CHECK(region_area(r, Sign::positive) == doctest::Approx(0.375));

  const auto one = partition_by_linear(kRef, {1.0, 2.0, 0.5});
  CHECK(one.size() == 1);
  CHECK(one[0].sign == Sign::positive);

  const auto zero_vertex = partition_by_linear(kRef, {0.0, 1.0, -1.0});
  CHECK(zero_vertex.size() == 2);
  CHECK(region_area(zero_vertex, Sign::positive) == doctest::Approx(0.25));
  CHECK(region_area(zero_vertex, Sign::negative) == doctest::Approx(0.25));

  const auto zero_edge = partition_by_linear(kRef, {0.0, 0.0, -3.0});
  CHECK(zero_edge.size() == 1);
  CHECK(zero_edge[0].sign == Sign::negative);
  CHECK(partition_by_linear(kRef, {0.0, 0.0, 0.0})[0].sign == Sign::zero);

  // Random values: areas always sum to |T| and each region matches its sign.
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::array<Point2, 3> c{Point2{0.2, 0.1}, Point2{1.3, -0.4}, Point2{0.5, 0.9}};
  for (int trial = 0; trial < 200; ++trial) {
    const std::array<double, 3> f{u(rng), u(rng), u(rng)};
    const auto parts = partition_by_linear(c, f);
    double sum = 0.0;
    for (const auto& p : parts) {
      sum += p.area;
      const Point2 m = (1.0 / 3.0) * (p.corners[0] + p.corners[1] + p.corners[2]);
      // Linear interpolant at the region centroid.
      const double det = 2.0 * signed_area(c[0], c[1], c[2]);
      const double l1 = 2.0 * signed_area(c[0], m, c[2]) / det, l2 = 2.0 * signed_area(c[0], c[1], m) / det;
      const double v = (1.0 - l1 - l2) * f[0] + l1 * f[1] + l2 * f[2];
      if (p.area > 1e-14) CHECK((v > 0.0 ? Sign::positive : Sign::negative) == p.sign);
    }
    CHECK(sum == doctest::Approx(std::abs(signed_area(c[0], c[1], c[2]))).epsilon(1e-13));
  }
}

TEST_CASE("control integrals") {
  const MeshPtr m = single_triangle();
  {
    const BangBangControl u(ControlBounds(-1.0, 1.0), FeFunction{m, {1.0, 1.0, 1.0}});
    const auto ci = control_integrals(u, 0);
    for (double v : ci.moments) CHECK(v == doctest::Approx(-0.5 / 3.0));
    CHECK(ci.l2sq == doctest::Approx(0.5));
  }
  {
    const BangBangControl u(ControlBounds(-1.0, 1.0), FeFunction{m, {-1.0, 1.0, 1.0}});
    CHECK(control_integrals(u, 0).l2sq == doctest::Approx(0.5));
  }
  {
    const BangBangControl u(ControlBounds(0.0, 1.0), FeFunction{m, {-1.0, 1.0, 1.0}});
    CHECK(control_integrals(u, 0).l2sq == doctest::Approx(0.125));
    // Moments against a fine quadrature of the discontinuous integrand.
    const auto ci = control_integrals(u, 0);
    const auto g = hat_gradients(*m, 0);
    for (int i = 0; i < 3; ++i) {
      double ref = 0.0;
      for (const auto& r : partition_by_linear(kRef, {-1.0, 1.0, 1.0}))
        ref += degree19_rule().integrate(r.corners, [&](Point2 x) {
          return u.value(r.sign) * ((i == 0 ? 1.0 : 0.0) + dot(g[i], x - kRef[0]));
        });
      CHECK(ci.moments[i] == doctest::Approx(ref).epsilon(1e-13));
    }
  }
  CHECK_THROWS(ControlBounds(1.0, 1.0));
  CHECK_THROWS(BangBangControl(ControlBounds(0.0, 1.0), FeFunction::zero(m), 2.0));
}

TEST_CASE("exact L1 distance of bang-bang controls") {
  const auto m = generate_domain(DomainId::unit_square, 3);
  const BangBangControl u1(ControlBounds(-1.0, 2.0), FeFunction::interpolate(m, [](Point2 p) { return p.x - 0.37; }));
  const BangBangControl u2(ControlBounds(-1.0, 2.0),
                           FeFunction::interpolate(m, [](Point2 p) { return std::sin(5.0 * p.y) - 0.4 + 0.3 * p.x; }));
  const double exact = control_l1_distance(u1, u2);
  CHECK(exact == doctest::Approx(sampled_l1(u1, u2, 64)).epsilon(2e-3));
  CHECK(control_l1_distance(u1, u1) == 0.0);
  CHECK(control_l1_distance(u2, u1) == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("strongly negative desired state yields u = a at once") {
  ProblemSpec s;
  s.name = "neg";
  s.domain = DomainId::unit_square;
  s.bounds = ControlBounds(-1.0, 1.0);
  s.desired_state = [](Point2) { return -100.0; };
  const auto m = uniform_refine(*generate_domain(DomainId::unit_square, 2));
  const OcpSolution sol = fixed_point_solve(s, m);
  CHECK(sol.converged);
  CHECK(sol.iterations <= 2);
  for (std::size_t v = 0; v < m->num_vertices(); ++v)
    if (!m->boundary_vertex()[v]) CHECK(sol.adjoint.coefficients[v] > 0.0);
  for (std::size_t t = 0; t < m->num_elements(); ++t)
    CHECK(control_integrals(sol.control, static_cast<Index>(t)).l2sq == doctest::Approx(m->area(static_cast<Index>(t))));
}

TEST_CASE("fixed point on ex1: consistency, seed independence, variational inequality") {
  const ProblemSpec spec = problem_ex1();
  MeshPtr m = generate_domain(DomainId::unit_square, 4);
  for (int i = 0; i < 3; ++i) m = uniform_refine(*m);
  FixedPointOptions opt;
  opt.auto_damping = true;
  const OcpSolution sol = fixed_point_solve(spec, m, opt);
  REQUIRE(sol.converged);
  CHECK(sol.increments.back() <= opt.tol * 2.0 * 1.0);

  // The returned control is the characterization of the returned adjoint.
  for (std::size_t t = 0; t < m->num_elements(); ++t)
    for (const auto& r : sign_partition(sol.adjoint, static_cast<Index>(t)).regions) {
      CHECK(sol.control.value(r.sign) == (r.sign == Sign::positive ? -1.0 : (r.sign == Sign::negative ? 1.0 : 0.0)));
    }

  // Self-consistency: re-solving from the returned control reproduces y and p.
  const OptimalitySystem sys(spec, m);
  const FeFunction y = sys.solve_state(sol.control);
  const FeFunction p = sys.solve_adjoint(y);
  std::vector<double> dy(y.coefficients.size()), dp(dy.size());
  for (std::size_t i = 0; i < dy.size(); ++i) {
    dy[i] = y.coefficients[i] - sol.state.coefficients[i];
    dp[i] = p.coefficients[i] - sol.adjoint.coefficients[i];
  }
  CHECK(energy_norm(sys.stiffness(), dy) <= 1e-10 * energy_norm(sys.stiffness(), y.coefficients));
  CHECK(energy_norm(sys.stiffness(), dp) <= 1e-10 * energy_norm(sys.stiffness(), p.coefficients));

  // Both constant initial controls reach the same fixed point.
  FixedPointOptions lo = opt, hi = opt;
  lo.initial = InitialControl::lower;
  hi.initial = InitialControl::upper;
  const OcpSolution sa = fixed_point_solve(spec, m, lo), sb = fixed_point_solve(spec, m, hi);
  REQUIRE(sa.converged);
  REQUIRE(sb.converged);
  CHECK(control_l1_distance(sa.control, sb.control) <= 10.0 * opt.tol * 2.0);

  // (p_h, u - u_h) >= 0 for admissible piecewise constant u.
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  double p_norm_sq = 0.0;
  for (std::size_t t = 0; t < m->num_elements(); ++t) {
    const auto ti = static_cast<Index>(t);
    p_norm_sq += degree19_rule().integrate(m->corners(ti), [&](Point2 x) {
      const auto c = m->corners(ti);
      const double det = 2.0 * signed_area(c[0], c[1], c[2]);
      const double l1 = 2.0 * signed_area(c[0], x, c[2]) / det, l2 = 2.0 * signed_area(c[0], c[1], x) / det;
      const double v = sol.adjoint.evaluate(ti, {1.0 - l1 - l2, l1, l2});
      return v * v;
    });
  }
  const double p_norm = std::sqrt(p_norm_sq);
  for (int trial = 0; trial < 50; ++trial) {
    double vi = 0.0;
    for (std::size_t t = 0; t < m->num_elements(); ++t) {
      const auto ti = static_cast<Index>(t);
      const double ut = unif(rng);
      for (const auto& r : sign_partition(sol.adjoint, ti).regions) {
        // Linear p over a region integrates to area times centroid value.
        const Point2 c = (1.0 / 3.0) * (r.corners[0] + r.corners[1] + r.corners[2]);
        const auto k = m->corners(ti);
        const double p_c = sol.adjoint.local(ti)[0] + dot(sol.adjoint.gradient(ti), c - k[0]);
        vi += r.area * p_c * (ut - sol.control.value(r.sign));
      }
    }
    CHECK(vi >= -1e-10 * p_norm);
  }
}

TEST_CASE("fixed-point option validation and non-convergence reporting") {
  const ProblemSpec spec = problem_ex1();
  const auto m = generate_domain(DomainId::unit_square, 4);
  FixedPointOptions bad;
  bad.tol = 0.0;
  CHECK_THROWS_AS(fixed_point_solve(spec, m, bad), std::invalid_argument);
  bad = {};
  bad.damping = 1.5;
  CHECK_THROWS_AS(fixed_point_solve(spec, m, bad), std::invalid_argument);
  FixedPointOptions one;
  one.max_iter = 1;
  const OcpSolution s = fixed_point_solve(spec, m, one);
  CHECK_FALSE(s.converged);
  CHECK(s.iterations == 1);
}

TEST_CASE("damped and undamped iterations agree") {
  const ProblemSpec spec = problem_ex1();
  const auto m = uniform_refine(*generate_domain(DomainId::unit_square, 4));
  FixedPointOptions plain, damped;
  damped.damping = 0.6;
  const OcpSolution a = fixed_point_solve(spec, m, plain), b = fixed_point_solve(spec, m, damped);
  REQUIRE(a.converged);
  REQUIRE(b.converged);
  CHECK(control_l1_distance(a.control, b.control) <= 1e-8);
}
