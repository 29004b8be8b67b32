#include "bbafem/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bbafem {

Column parse_column(std::string_view name) {
  for (std::size_t i = 0; i < kColumnNames.size(); ++i)
    if (kColumnNames[i] == name) return static_cast<Column>(i);
  throw std::invalid_argument("unknown column '" + std::string(name) + "'");
}

bool ConvergenceRow::has_errors() const { return !std::isnan(error_y) && !std::isnan(error_p) && !std::isnan(error_u); }

double ConvergenceRow::total_estimate() const {
  return std::sqrt(est_y * est_y + est_p_2 * est_p_2 + est_p_inf * est_p_inf);
}

double ConvergenceRow::get(Column c) const {
  switch (c) {
    case Column::dofs: return static_cast<double>(ndofs);
    case Column::error_y: return error_y;
    case Column::error_p: return error_p;
    case Column::error_u: return error_u;
    case Column::est_y: return est_y;
    case Column::est_p_2: return est_p_2;
    case Column::est_p_inf: return est_p_inf;
    case Column::eff_index: return eff_index;
    case Column::iota: return iota;
    case Column::fp_iters: return fp_iterations;
  }
  return kMissing;
}

std::vector<double> ConvergenceRecord::column(Column c) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.get(c));
  return out;
}

std::vector<Index> mark(std::span<const double> indicators, double fraction) {
  if (indicators.empty()) throw std::invalid_argument("cannot mark an empty indicator field");
  if (!(fraction > 0.0 && fraction < 1.0)) throw std::invalid_argument("marking fraction must lie in (0, 1)");
  const double top = *std::max_element(indicators.begin(), indicators.end());
  std::vector<Index> marked;
  for (std::size_t t = 0; t < indicators.size(); ++t)
    if (indicators[t] > fraction * top) marked.push_back(static_cast<Index>(t));
  if (marked.empty())
    for (std::size_t t = 0; t < indicators.size(); ++t)
      if (indicators[t] == top) marked.push_back(static_cast<Index>(t));
  return marked;
}

double fit_rate(std::span<const double> dofs, std::span<const double> values, std::size_t last) {
  if (dofs.size() != values.size()) throw std::invalid_argument("column lengths differ");
  if (dofs.size() < 3) throw std::invalid_argument("rate fit needs at least three rows");
  if (last < 2) throw std::invalid_argument("rate fit needs a window of at least two rows");
  const std::size_t k = std::min(last, dofs.size());
  const std::size_t first = dofs.size() - k;
  double mx = 0.0, my = 0.0;
  std::vector<double> lx(k), ly(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double x = dofs[first + i], y = values[first + i];
    if (!(x > 0.0) || !(y > 0.0)) throw std::domain_error("rate fit needs positive values");
    lx[i] = std::log(x);
    ly[i] = std::log(y);
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(k);
  my /= static_cast<double>(k);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (!(sxx > 0.0)) throw std::domain_error("rate fit needs distinct dof counts");
  return sxy / sxx;
}

double fit_rate(const ConvergenceRecord& record, Column column, std::size_t last) {
  const auto x = record.column(Column::dofs);
  const auto y = record.column(column);
  return fit_rate(x, y, last);
}

std::size_t count_ndofs(const TriangleMesh& mesh) {
  const auto& b = mesh.boundary_vertex();
  return 2 * static_cast<std::size_t>(std::count(b.begin(), b.end(), false));
}

LevelOutcome solve_level(const ProblemSpec& problem, MeshPtr mesh, const FixedPointOptions& options,
                         const FixedPointGuess* guess) {
  OcpSolution sol = fixed_point_solve(problem, mesh, options, guess);
  IndicatorField field = compute_indicators(sol, problem);
  const GlobalEstimate est = combine(field, *mesh);
  ConvergenceRow row;
  row.ndofs = count_ndofs(*mesh);
  row.est_y = est.eta_st2;
  row.est_p_2 = est.eta_adj2;
  row.est_p_inf = est.eta_adj_inf;
  row.iota = est.iota;
  row.fp_iterations = sol.iterations;
  if (problem.exact) {
    row.error_y = error_y_l2(sol, problem);
    row.error_p = error_p_linf(sol, problem);
    row.error_u = error_u_l1(sol, problem);
    row.eff_index = effectivity(est.total, row.error_y, row.error_p, row.error_u);
  }
  return {std::move(sol), std::move(field), est, row};
}

namespace {

template <class Refine>
LoopResult run_loop(const ProblemSpec& problem, MeshPtr mesh, const LoopConfig& config, Refine&& refine) {
  if (config.max_ndofs <= count_ndofs(*mesh))
    throw std::invalid_argument("dof budget " + std::to_string(config.max_ndofs) + " does not exceed the initial mesh's " +
                                std::to_string(count_ndofs(*mesh)) + " dofs");
  LoopResult result;
  std::optional<FixedPointGuess> guess;
  for (int level = 0;; ++level) {
    std::optional<LevelOutcome> solved;
    try {
      solved.emplace(solve_level(problem, mesh, config.fixed_point, guess ? &*guess : nullptr));
    } catch (const SolverError& e) {
      result.aborted = true;
      result.failed_level = level;
      result.failure = "linear solver failed on level " + std::to_string(level) + ": " + e.what();
      return result;
    }
    LevelOutcome& out = *solved;
    result.record.rows.push_back(out.row);
    if (config.keep_meshes) result.meshes.push_back(mesh);
    if (config.observer) config.observer({level, mesh, out.solution, out.indicators, out.estimate, result.record.rows.back()});
    if (!out.solution.converged) {
      result.aborted = true;
      result.failed_level = level;
      result.failure = "fixed-point iteration did not converge in " + std::to_string(out.solution.iterations) +
                       " iterations on level " + std::to_string(level);
      result.final_solution = std::move(out.solution);
      return result;
    }

    MeshPtr next = refine(*mesh, out.indicators);
    if (count_ndofs(*next) > config.max_ndofs) {
      result.final_solution = std::move(out.solution);
      return result;
    }
    if (config.warm_start) {
      guess = FixedPointGuess{prolongate(out.solution.adjoint.coefficients, *next),
                              prolongate(out.solution.state.coefficients, *next),
                              prolongate(out.solution.adjoint.coefficients, *next)};
      // Boundary values of the prolongated state and adjoint are already zero.
    }
    mesh = std::move(next);
  }
}

}  // namespace

LoopResult adaptive_loop(const ProblemSpec& problem, MeshPtr initial, const LoopConfig& config) {
  return run_loop(problem, std::move(initial), config, [&](const TriangleMesh& m, const IndicatorField& field) {
    const auto marked = mark(field.total, config.mark_fraction);
    return bisect(m, marked);
  });
}

LoopResult uniform_loop(const ProblemSpec& problem, MeshPtr initial, const LoopConfig& config) {
  return run_loop(problem, std::move(initial), config,
                  [](const TriangleMesh& m, const IndicatorField&) { return uniform_refine(m); });
}

}  // namespace bbafem
