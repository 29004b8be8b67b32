#include "bbafem/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bbafem {

namespace {

constexpr double pi = std::numbers::pi;

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// ---- ex1 -------------------------------------------------------------------

double ex1_state(Point2 x) { return std::sin(pi * x.x) * std::sin(pi * x.y); }
double ex1_adjoint(Point2 x) { return -std::sin(2 * pi * x.x) * std::sin(2 * pi * x.y) / (8 * pi * pi); }

// ---- ex2 -------------------------------------------------------------------
// y = S(x) phi(rho, omega) with S = sin(pi (x1+1)/2) sin(pi (x2+1)/2) and the
// harmonic phi = rho^(2/3) sin(2 omega / 3); p = (1/2 - rho) y.

struct Ex2Fields {
  double y;
  Point2 grad_y;
  double lap_y;
  double p;
  double lap_p;
};

Ex2Fields ex2_fields(Point2 x) {
  const double rho = std::hypot(x.x, x.y);
  const double omega = polar_angle(x);
  const double a1 = pi * (x.x + 1.0) / 2.0, a2 = pi * (x.y + 1.0) / 2.0;
  const double s1 = std::sin(a1), c1 = std::cos(a1), s2 = std::sin(a2), c2 = std::cos(a2);
  const double S = s1 * s2;
  const Point2 gS{0.5 * pi * c1 * s2, 0.5 * pi * s1 * c2};
  const double lapS = -0.5 * pi * pi * S;

  const double phi = std::pow(rho, 2.0 / 3.0) * std::sin(2.0 * omega / 3.0);
  const double gscale = (2.0 / 3.0) * std::pow(rho, -1.0 / 3.0);
  const Point2 gphi{-gscale * std::sin(omega / 3.0), gscale * std::cos(omega / 3.0)};

  Ex2Fields f;
  f.y = S * phi;
  f.grad_y = phi * gS + S * gphi;
  f.lap_y = lapS * phi + 2.0 * dot(gS, gphi);
  f.p = (0.5 - rho) * f.y;
  const Point2 e_rho{x.x / rho, x.y / rho};
  f.lap_p = (0.5 - rho) * f.lap_y - 2.0 * dot(e_rho, f.grad_y) - f.y / rho;
  return f;
}

constexpr double kCornerRadius = 1e-14;

double ex2_state(Point2 x) { return std::hypot(x.x, x.y) < kCornerRadius ? 0.0 : ex2_fields(x).y; }
double ex2_adjoint(Point2 x) { return std::hypot(x.x, x.y) < kCornerRadius ? 0.0 : ex2_fields(x).p; }

double ex2_derivative_guard(Point2 x) {
  return std::hypot(x.x, x.y) < kCornerRadius ? std::numeric_limits<double>::quiet_NaN() : 0.0;
}

}  // namespace

double polar_angle(Point2 x) {
  const double w = std::atan2(x.y, x.x);
  return w < 0.0 ? w + 2.0 * pi : w;
}

ProblemSpec problem_ex1() {
  ProblemSpec s;
  s.name = "ex1";
  s.domain = DomainId::unit_square;
  s.bounds = ControlBounds(-1.0, 1.0);
  s.forcing = [](Point2 x) { return 2.0 * pi * pi * ex1_state(x) + sign(ex1_adjoint(x)); };
  s.desired_state = [](Point2 x) { return ex1_state(x) + std::sin(2 * pi * x.x) * std::sin(2 * pi * x.y); };
  ExactSolution e;
  e.state = ex1_state;
  e.state_gradient = [](Point2 x) {
    return Point2{pi * std::cos(pi * x.x) * std::sin(pi * x.y), pi * std::sin(pi * x.x) * std::cos(pi * x.y)};
  };
  e.adjoint = ex1_adjoint;
  e.control = [](Point2 x) { return -sign(ex1_adjoint(x)); };
  s.exact = std::move(e);
  return s;
}

ProblemSpec problem_ex2() {
  ProblemSpec s;
  s.name = "ex2";
  s.domain = DomainId::lshape_sw;
  s.bounds = ControlBounds(-1.0, 1.0);
  s.forcing = [](Point2 x) {
    if (std::isnan(ex2_derivative_guard(x))) return std::numeric_limits<double>::quiet_NaN();
    const Ex2Fields f = ex2_fields(x);
    return -f.lap_y + sign(f.p);
  };
  s.desired_state = [](Point2 x) {
    if (std::isnan(ex2_derivative_guard(x))) return std::numeric_limits<double>::quiet_NaN();
    const Ex2Fields f = ex2_fields(x);
    return f.y + f.lap_p;
  };
  ExactSolution e;
  e.state = ex2_state;
  e.state_gradient = [](Point2 x) {
    return std::hypot(x.x, x.y) < kCornerRadius ? Point2{0.0, 0.0} : ex2_fields(x).grad_y;
  };
  e.adjoint = ex2_adjoint;
  e.control = [](Point2 x) { return -sign(ex2_adjoint(x)); };
  s.exact = std::move(e);
  return s;
}

ProblemSpec problem_ex3() {
  ProblemSpec s;
  s.name = "ex3";
  s.domain = DomainId::lshape_ne;
  s.bounds = ControlBounds(-0.5, 0.5);
  s.desired_state = [](Point2 x) {
    const double r2 = x.x * x.x + x.y * x.y;
    if (r2 == 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / std::pow(r2, 0.25) - 10.0 * std::sin(x.x * x.y);
  };
  return s;
}

ProblemSpec make_problem(std::string_view name) {
  if (name == "ex1") return problem_ex1();
  if (name == "ex2") return problem_ex2();
  if (name == "ex3") return problem_ex3();
  throw std::invalid_argument("unknown problem '" + std::string(name) + "'");
}

namespace {

const ExactSolution& require_exact(const ProblemSpec& spec) {
  if (!spec.exact) throw std::invalid_argument("problem '" + spec.name + "' has no exact solution");
  return *spec.exact;
}

double element_error_y_sq(const OcpSolution& sol, const ExactSolution& ex, Index t) {
  const QuadratureRule& rule = degree19_rule();
  const TriangleMesh& mesh = *sol.state.mesh;
  const auto corners = mesh.corners(t);
  const auto pts = rule.points();
  const auto wts = rule.weights();
  double s = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double d = ex.state(QuadratureRule::map(pts[q], corners)) - sol.state.evaluate(t, pts[q]);
    s += wts[q] * d * d;
  }
  return mesh.area(t) * s;
}

double element_error_p_max(const OcpSolution& sol, const ExactSolution& ex, Index t) {
  const QuadratureRule& rule = degree19_rule();
  const TriangleMesh& mesh = *sol.adjoint.mesh;
  const auto corners = mesh.corners(t);
  const auto local = sol.adjoint.local(t);
  double m = 0.0;
  for (int k = 0; k < 3; ++k) m = std::max(m, std::abs(ex.adjoint(corners[k]) - local[k]));
  for (const auto& b : rule.points()) m = std::max(m, std::abs(ex.adjoint(QuadratureRule::map(b, corners)) - sol.adjoint.evaluate(t, b)));
  return m;
}

// Measure of {u_exact != u_h} weighted by the jump, where the exact control is
// the bang-bang characterization of the exact adjoint. Quadrature cannot
// resolve that discontinuity, so triangles whose exact adjoint changes sign are
// split recursively and the leaves are cut along the linear interpolant.
constexpr int kSignSplitDepth = 7;

double mismatch_l1(const ControlBounds& bounds, const ExactSolution& ex, const std::array<Point2, 3>& c, double uh,
                   int depth) {
  const auto control_of = [&](double p) { return p > 0.0 ? bounds.lower : (p < 0.0 ? bounds.upper : bounds.midpoint()); };
  const std::array<double, 3> pv{ex.adjoint(c[0]), ex.adjoint(c[1]), ex.adjoint(c[2])};
  const std::array<Point2, 3> mid{0.5 * (c[1] + c[2]), 0.5 * (c[2] + c[0]), 0.5 * (c[0] + c[1])};
  if (depth == 0) {
    double s = 0.0;
    for (const auto& r : partition_by_linear(c, pv)) {
      const double u = r.sign == Sign::positive ? bounds.lower : (r.sign == Sign::negative ? bounds.upper : bounds.midpoint());
      s += r.area * std::abs(u - uh);
    }
    return s;
  }
  bool pos = false, neg = false;
  auto probe = [&](double v) {
    pos = pos || v > 0.0;
    neg = neg || v < 0.0;
  };
  for (double v : pv) probe(v);
  for (const auto& m : mid) probe(ex.adjoint(m));
  probe(ex.adjoint((1.0 / 3.0) * (c[0] + c[1] + c[2])));
  if (!(pos && neg)) {
    const double u = control_of(pos ? 1.0 : (neg ? -1.0 : 0.0));
    return std::abs(signed_area(c[0], c[1], c[2])) * std::abs(u - uh);
  }
  return mismatch_l1(bounds, ex, {c[0], mid[2], mid[1]}, uh, depth - 1) +
         mismatch_l1(bounds, ex, {mid[2], c[1], mid[0]}, uh, depth - 1) +
         mismatch_l1(bounds, ex, {mid[1], mid[0], c[2]}, uh, depth - 1) +
         mismatch_l1(bounds, ex, {mid[0], mid[1], mid[2]}, uh, depth - 1);
}

double element_error_u_l1(const OcpSolution& sol, const ExactSolution& ex, Index t) {
  double s = 0.0;
  for (const auto& r : sign_partition(sol.adjoint, t).regions)
    s += mismatch_l1(sol.control.bounds, ex, r.corners, sol.control.value(r.sign), kSignSplitDepth);
  return s;
}

}  // namespace

double error_y_l2(const OcpSolution& sol, const ProblemSpec& spec) {
  const ExactSolution& ex = require_exact(spec);
  double s = 0.0;
  for (std::size_t t = 0; t < sol.state.mesh->num_elements(); ++t) s += element_error_y_sq(sol, ex, static_cast<Index>(t));
  return std::sqrt(s);
}

double error_p_linf(const OcpSolution& sol, const ProblemSpec& spec) {
  const ExactSolution& ex = require_exact(spec);
  double m = 0.0;
  for (std::size_t t = 0; t < sol.adjoint.mesh->num_elements(); ++t) m = std::max(m, element_error_p_max(sol, ex, static_cast<Index>(t)));
  return m;
}

double error_u_l1(const OcpSolution& sol, const ProblemSpec& spec) {
  const ExactSolution& ex = require_exact(spec);
  double s = 0.0;
  for (std::size_t t = 0; t < sol.adjoint.mesh->num_elements(); ++t) s += element_error_u_l1(sol, ex, static_cast<Index>(t));
  return s;
}

double effectivity(double total_estimate, double error_y, double error_p, double error_u) {
  const double denom = std::sqrt(error_u * error_u + error_y * error_y + error_p * error_p);
  if (!(denom > 0.0)) throw std::domain_error("effectivity index undefined for zero error");
  return total_estimate / denom;
}

std::vector<double> local_efficiency_ratios(const OcpSolution& sol, const ProblemSpec& spec, const IndicatorField& field) {
  const ExactSolution& ex = require_exact(spec);
  const TriangleMesh& mesh = *sol.state.mesh;
  const QuadratureRule& rule = degree19_rule();
  const std::size_t n = mesh.num_elements();

  std::vector<double> ey(n), ep(n), eu(n), osc_u(n), osc_d(n);
  for (std::size_t t = 0; t < n; ++t) {
    const auto ti = static_cast<Index>(t);
    ey[t] = element_error_y_sq(sol, ex, ti);
    ep[t] = element_error_p_max(sol, ex, ti);
    eu[t] = element_error_u_l1(sol, ex, ti);

    // Oscillation of f + u_h and of y_d about their element means.
    const auto regions = sign_partition(sol.control.carrier, ti).regions;
    auto residual = [&](double u) {
      return [&, u](Point2 x) { return (spec.forcing ? spec.forcing(x) : 0.0) + u; };
    };
    double mean_u = 0.0;
    for (const auto& r : regions) mean_u += rule.integrate(r.corners, residual(sol.control.value(r.sign)));
    mean_u /= mesh.area(ti);
    double su = 0.0;
    for (const auto& r : regions) {
      const auto g = residual(sol.control.value(r.sign));
      su += rule.integrate(r.corners, [&](Point2 x) {
        const double d = g(x) - mean_u;
        return d * d;
      });
    }
    osc_u[t] = su;
    const auto corners = mesh.corners(ti);
    const double mean_d = rule.integrate(corners, spec.desired_state) / mesh.area(ti);
    osc_d[t] = rule.integrate(corners, [&](Point2 x) {
      const double d = spec.desired_state(x) - mean_d;
      return d * d;
    });
  }

  std::vector<double> ratio(n);
  for (std::size_t t = 0; t < n; ++t) {
    const auto ti = static_cast<Index>(t);
    const double h = mesh.diameter(ti), h2 = h * h, h4 = h2 * h2;
    double sy = 0.0, sp = 0.0, su = 0.0, so_u = 0.0, so_d = 0.0;
    for (Index m : star(mesh, ti).members) {
      sy += ey[m];
      sp = std::max(sp, ep[m]);
      su += eu[m];
      so_u += osc_u[m];
      so_d += osc_d[m];
    }
    const double bound = (1.0 + h4 + h2) * sy + (1.0 + h2) * sp * sp + h2 * su * su + h4 * so_u + (h4 + h2) * so_d;
    const double lhs = field.total[t] * field.total[t];
    ratio[t] = bound > 0.0 ? lhs / bound : (lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  }
  return ratio;
}

}  // namespace bbafem
