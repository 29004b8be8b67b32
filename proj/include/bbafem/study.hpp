#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "bbafem/adaptive.hpp"

namespace bbafem {

enum class RefinementMode { uniform, adaptive };

RefinementMode parse_mode(std::string_view name);
std::string_view mode_name(RefinementMode mode);

/// One convergence study as driven from the command line.
struct RunConfig {
  std::string problem = "ex1";
  RefinementMode mode = RefinementMode::adaptive;
  std::size_t max_ndofs = 100000;
  double mark_fraction = 0.5;
  double cg_tol = 1e-12;
  double fp_tol = 1e-10;
  int fp_max_iter = 100;
  /// Fixed relaxation in (0, 1]; ignored while fp_auto_damping is set.
  double fp_damping = 1.0;
  bool fp_auto_damping = true;
  int initial_n = 4;
  std::filesystem::path output_dir = ".";
  bool export_meshes = false;
  /// Reserved for randomized checks; the study itself is deterministic.
  std::uint64_t seed = 0;

  void validate() const;
};

struct RunReport {
  ConvergenceRecord record;
  std::filesystem::path table_path;
  bool solver_failed = false;
  std::string message;
};

/// `errors_<problem>_<mode>.dat` for the given configuration.
std::string table_filename(const RunConfig& config);

/// Runs the study and writes its table (and meshes if requested). Solver
/// failures still write the partial table and are reported, not thrown.
RunReport run_study(const RunConfig& config);

}  // namespace bbafem
