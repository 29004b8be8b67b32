#pragma once

#include <array>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bbafem/benchmarks.hpp"
#include "bbafem/estimators.hpp"
#include "bbafem/ocp.hpp"

namespace bbafem {

enum class Column { dofs, error_y, error_p, error_u, est_y, est_p_2, est_p_inf, eff_index, iota, fp_iters };

inline constexpr std::array<std::string_view, 10> kColumnNames = {
    "dofs", "error_y", "error_p", "error_u", "est_y", "est_p_2", "est_p_inf", "eff_index", "iota", "fp_iters"};

Column parse_column(std::string_view name);

struct ConvergenceRow {
  static constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

  std::size_t ndofs = 0;
  double error_y = kMissing;
  double error_p = kMissing;
  double error_u = kMissing;
  double est_y = 0.0;
  double est_p_2 = 0.0;
  double est_p_inf = 0.0;
  double eff_index = kMissing;
  double iota = 0.0;
  int fp_iterations = 0;

  bool has_errors() const;
  double total_estimate() const;
  double get(Column c) const;
};

struct ConvergenceRecord {
  std::vector<ConvergenceRow> rows;

  std::vector<double> column(Column c) const;
};

/// Elements with E_T > fraction * max E. When the strict rule marks nothing,
/// every element attaining the maximum is marked.
std::vector<Index> mark(std::span<const double> indicators, double fraction = 0.5);

/// Least-squares slope of log(column) against log(dofs) over the last k rows.
double fit_rate(const ConvergenceRecord& record, Column column, std::size_t last = 5);
double fit_rate(std::span<const double> dofs, std::span<const double> values, std::size_t last = 5);

/// Everything known about one solved level, handed to observers.
struct LevelReport {
  int level = 0;
  const MeshPtr& mesh;
  const OcpSolution& solution;
  const IndicatorField& indicators;
  const GlobalEstimate& estimate;
  const ConvergenceRow& row;
};

struct LoopConfig {
  /// Levels are solved while 2 dim V <= max_ndofs.
  std::size_t max_ndofs = 200000;
  double mark_fraction = 0.5;
  FixedPointOptions fixed_point;
  /// Prolongate the previous level's solution as the initial iterate.
  bool warm_start = true;
  bool keep_meshes = false;
  std::function<void(const LevelReport&)> observer;
};

struct LoopResult {
  ConvergenceRecord record;
  std::vector<MeshPtr> meshes;  // filled when keep_meshes is set
  std::optional<OcpSolution> final_solution;
  bool aborted = false;
  int failed_level = -1;
  std::string failure;
};

/// 2 dim V: twice the number of interior vertices.
std::size_t count_ndofs(const TriangleMesh& mesh);

/// Solve, estimate, mark, bisect.
LoopResult adaptive_loop(const ProblemSpec& problem, MeshPtr initial, const LoopConfig& config);
/// Solve and estimate on successive uniform refinements.
LoopResult uniform_loop(const ProblemSpec& problem, MeshPtr initial, const LoopConfig& config);

/// Solve and estimate on one mesh, filling a record row.
struct LevelOutcome {
  OcpSolution solution;
  IndicatorField indicators;
  GlobalEstimate estimate;
  ConvergenceRow row;
};
LevelOutcome solve_level(const ProblemSpec& problem, MeshPtr mesh, const FixedPointOptions& options,
                         const FixedPointGuess* guess = nullptr);

}  // namespace bbafem
