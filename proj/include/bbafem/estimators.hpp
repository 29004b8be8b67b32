#pragma once

#include <vector>

#include "bbafem/ocp.hpp"

namespace bbafem {

/// Normal-derivative jump n+ . grad f|T+ + n- . grad f|T- on an interior edge.
double jump(const FeFunction& f, Index edge);

/// E_st,T^2 = h^4 ||f + u||_T^2 + sum_e h^3 |e| jump(y)^2.
double state_indicator(const OcpSolution& sol, const ProblemSpec& problem, Index t);
/// E_adj,T^2 = h^4 ||y - y_d||_T^2 + sum_e h^3 |e| jump(p)^2.
double adjoint_indicator_l2(const OcpSolution& sol, const ProblemSpec& problem, Index t);
/// E_adj,inf,T = h ||y - y_d||_T + h max_e |jump(p)|  (two space dimensions).
double adjoint_indicator_inf(const OcpSolution& sol, const ProblemSpec& problem, Index t);

/// |log(max_T 1/h_T)|
double iota(const TriangleMesh& mesh);

struct IndicatorField {
  std::vector<double> est_sq;
  std::vector<double> adj_sq;
  std::vector<double> adj_inf;
  std::vector<double> total;  // E_T
  std::size_t size() const { return total.size(); }
};

struct GlobalEstimate {
  double eta_st2 = 0.0;
  double eta_adj2 = 0.0;
  double eta_adj_inf = 0.0;
  double iota = 0.0;
  double total = 0.0;  // E with E^2 = eta_st2^2 + eta_adj_inf^2 + eta_adj2^2

  /// Upper bound combination for the state and adjoint errors under the
  /// measure condition with exponent beta in (0, 1], including log factors.
  double state_adjoint_bound(double beta) const;
  double control_bound(double beta) const;
};

/// All three indicators on every element, with E_T left to combine().
IndicatorField compute_indicators(const OcpSolution& sol, const ProblemSpec& problem);

/// Fills the E_T column and reduces the global estimators (sum, sum, max).
GlobalEstimate combine(IndicatorField& field, const TriangleMesh& mesh);

}  // namespace bbafem
