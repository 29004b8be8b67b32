#pragma once

#include <string_view>
#include <vector>

#include "bbafem/estimators.hpp"
#include "bbafem/ocp.hpp"
#include "bbafem/problem.hpp"

namespace bbafem {

/// Unit square, a = -1, b = 1, smooth state sin(pi x) sin(pi y).
ProblemSpec problem_ex1();
/// L-shaped domain without the quadrant x > 0, y < 0; corner singularity
/// rho^(2/3) and a control switching across the circle rho = 1/2.
ProblemSpec problem_ex2();
/// L-shaped domain without the quadrant x > 0, y > 0; unbounded desired
/// state, a = -1/2, b = 1/2, no exact solution.
ProblemSpec problem_ex3();
/// "ex1", "ex2" or "ex3".
ProblemSpec make_problem(std::string_view name);

/// Polar angle in [0, 2 pi), measured counterclockwise from the positive x axis.
double polar_angle(Point2 x);

/// ||y_exact - y_h||_{L2}
double error_y_l2(const OcpSolution& sol, const ProblemSpec& spec);
/// max |p_exact - p_h| over all vertices and degree-19 quadrature nodes.
double error_p_linf(const OcpSolution& sol, const ProblemSpec& spec);
/// ||u_exact - u_h||_{L1} with u_exact the bang-bang characterization of the
/// exact adjoint; regions where that adjoint changes sign are subdivided.
double error_u_l1(const OcpSolution& sol, const ProblemSpec& spec);

/// E / sqrt(error_u^2 + error_y^2 + error_p^2). Throws on a zero denominator.
double effectivity(double total_estimate, double error_y, double error_p, double error_u);

/// Per element, E_T^2 divided by the local efficiency bound: star-local
/// errors plus mean-value oscillation of f + u_h and of the desired state.
std::vector<double> local_efficiency_ratios(const OcpSolution& sol, const ProblemSpec& spec, const IndicatorField& field);

}  // namespace bbafem
