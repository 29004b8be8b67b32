#include "bbafem/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bbafem {

double jump(const FeFunction& f, Index edge) {
  const TriangleMesh& mesh = *f.mesh;
  const auto nb = mesh.edge_elements()[edge];
  if (nb.minus == kNoIndex) throw std::invalid_argument("jump requested on a boundary edge");
  auto local_edge = [&](Index t) {
    const auto& ee = mesh.element_edges()[t];
    return static_cast<int>(std::find(ee.begin(), ee.end(), edge) - ee.begin());
  };
  const Point2 n_plus = mesh.outward_normal(nb.plus, local_edge(nb.plus));
  const Point2 n_minus = mesh.outward_normal(nb.minus, local_edge(nb.minus));
  return dot(n_plus, f.gradient(nb.plus)) + dot(n_minus, f.gradient(nb.minus));
}

namespace {

struct JumpSums {
  double weighted_sq = 0.0;  // sum_e |e| jump^2 over interior edges
  double max_abs = 0.0;
};

JumpSums jump_sums(const FeFunction& f, Index t) {
  const TriangleMesh& mesh = *f.mesh;
  JumpSums s;
  for (Index e : mesh.element_edges()[t]) {
    if (mesh.is_boundary_edge(e)) continue;
    const double j = jump(f, e);
    s.weighted_sq += mesh.edge_length(e) * j * j;
    s.max_abs = std::max(s.max_abs, std::abs(j));
  }
  return s;
}

// ||f + u||_T^2 with quadrature on each sign region of the control.
double state_residual_sq(const OcpSolution& sol, const ProblemSpec& problem, Index t) {
  const QuadratureRule& rule = degree19_rule();
  if (!problem.forcing) return control_integrals(sol.control, t).l2sq;
  double sum = 0.0;
  for (const auto& r : sign_partition(sol.control.carrier, t).regions) {
    const double u = sol.control.value(r.sign);
    sum += rule.integrate(r.corners, [&](Point2 x) {
      const double v = problem.forcing(x) + u;
      return v * v;
    });
  }
  return sum;
}

// ||y - y_d||_T^2 by quadrature.
double adjoint_residual_sq(const OcpSolution& sol, const ProblemSpec& problem, Index t) {
  const QuadratureRule& rule = degree19_rule();
  const TriangleMesh& mesh = *sol.state.mesh;
  const auto pts = rule.points();
  const auto wts = rule.weights();
  const auto corners = mesh.corners(t);
  double sum = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double v = sol.state.evaluate(t, pts[q]) - problem.desired_state(QuadratureRule::map(pts[q], corners));
    sum += wts[q] * v * v;
  }
  return mesh.area(t) * sum;
}

}  // namespace

double state_indicator(const OcpSolution& sol, const ProblemSpec& problem, Index t) {
  const double h = sol.state.mesh->diameter(t);
  return std::pow(h, 4) * state_residual_sq(sol, problem, t) + std::pow(h, 3) * jump_sums(sol.state, t).weighted_sq;
}

double adjoint_indicator_l2(const OcpSolution& sol, const ProblemSpec& problem, Index t) {
  const double h = sol.adjoint.mesh->diameter(t);
  return std::pow(h, 4) * adjoint_residual_sq(sol, problem, t) + std::pow(h, 3) * jump_sums(sol.adjoint, t).weighted_sq;
}

double adjoint_indicator_inf(const OcpSolution& sol, const ProblemSpec& problem, Index t) {
  const double h = sol.adjoint.mesh->diameter(t);
  return h * std::sqrt(adjoint_residual_sq(sol, problem, t)) + h * jump_sums(sol.adjoint, t).max_abs;
}

double iota(const TriangleMesh& mesh) { return std::abs(std::log(1.0 / mesh.min_diameter())); }

double GlobalEstimate::state_adjoint_bound(double beta) const {
  if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must lie in (0, 1]");
  const double w = iota * eta_adj_inf;
  return eta_st2 * eta_st2 + eta_adj2 + std::pow(w, beta + 1.0) + std::pow(w, 2.0 / (2.0 - beta));
}

double GlobalEstimate::control_bound(double beta) const {
  if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must lie in (0, 1]");
  const double w = iota * eta_adj_inf;
  return std::pow(eta_st2, 2.0 * beta) + std::pow(eta_adj2, beta) + std::pow(w, beta * (beta + 1.0)) +
         std::pow(w, 2.0 * beta / (2.0 - beta));
}

IndicatorField compute_indicators(const OcpSolution& sol, const ProblemSpec& problem) {
  const TriangleMesh& mesh = *sol.state.mesh;
  const std::size_t n = mesh.num_elements();
  IndicatorField field;
  field.est_sq.resize(n);
  field.adj_sq.resize(n);
  field.adj_inf.resize(n);
  field.total.assign(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    const auto ti = static_cast<Index>(t);
    const double h = mesh.diameter(ti);
    const double h3 = h * h * h, h4 = h3 * h;
    const JumpSums jy = jump_sums(sol.state, ti);
    const JumpSums jp = jump_sums(sol.adjoint, ti);
    const double adj_res = adjoint_residual_sq(sol, problem, ti);
    field.est_sq[t] = h4 * state_residual_sq(sol, problem, ti) + h3 * jy.weighted_sq;
    field.adj_sq[t] = h4 * adj_res + h3 * jp.weighted_sq;
    field.adj_inf[t] = h * std::sqrt(adj_res) + h * jp.max_abs;
  }
  return field;
}

GlobalEstimate combine(IndicatorField& field, const TriangleMesh& mesh) {
  GlobalEstimate g;
  const std::size_t n = field.est_sq.size();
  field.total.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    field.total[t] = std::sqrt(field.est_sq[t] + field.adj_sq[t] + field.adj_inf[t] * field.adj_inf[t]);
    g.eta_adj_inf = std::max(g.eta_adj_inf, field.adj_inf[t]);
  }
  std::vector<double> ones(n, 1.0);
  g.eta_st2 = std::sqrt(dot(field.est_sq, ones));
  g.eta_adj2 = std::sqrt(dot(field.adj_sq, ones));
  g.iota = iota(mesh);
  g.total = std::sqrt(g.eta_st2 * g.eta_st2 + g.eta_adj_inf * g.eta_adj_inf + g.eta_adj2 * g.eta_adj2);
  return g;
}

}  // namespace bbafem
