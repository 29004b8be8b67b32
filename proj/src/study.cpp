#include "bbafem/study.hpp"

#include <stdexcept>

#include "bbafem/io.hpp"

namespace bbafem {

RefinementMode parse_mode(std::string_view name) {
  if (name == "uniform") return RefinementMode::uniform;
  if (name == "adaptive") return RefinementMode::adaptive;
  throw std::invalid_argument("unknown refinement mode '" + std::string(name) + "'");
}

std::string_view mode_name(RefinementMode mode) { return mode == RefinementMode::uniform ? "uniform" : "adaptive"; }

void RunConfig::validate() const {
  make_problem(problem);
  if (max_ndofs == 0) throw std::invalid_argument("max_ndofs must be positive");
  if (!(mark_fraction > 0.0 && mark_fraction < 1.0)) throw std::invalid_argument("mark fraction must lie in (0, 1)");
  if (!(cg_tol > 0.0)) throw std::invalid_argument("cg tolerance must be positive");
  if (!(fp_tol > 0.0)) throw std::invalid_argument("fixed-point tolerance must be positive");
  if (fp_max_iter < 1) throw std::invalid_argument("fixed-point iteration cap must be positive");
  if (!(fp_damping > 0.0 && fp_damping <= 1.0)) throw std::invalid_argument("damping must lie in (0, 1]");
  if (initial_n < 1) throw std::invalid_argument("initial subdivision must be at least 1");
}

std::string table_filename(const RunConfig& config) {
  return "errors_" + config.problem + "_" + std::string(mode_name(config.mode)) + ".dat";
}

RunReport run_study(const RunConfig& config) {
  config.validate();
  const ProblemSpec problem = make_problem(config.problem);
  const MeshPtr initial = generate_domain(problem.domain, config.initial_n);
  if (config.max_ndofs <= count_ndofs(*initial))
    throw std::invalid_argument("max dofs " + std::to_string(config.max_ndofs) + " does not exceed the initial " +
                                std::to_string(count_ndofs(*initial)) + " dofs");

  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  if (!std::filesystem::is_directory(config.output_dir)) throw IoError("output directory " + config.output_dir.string() + " is not usable");

  LoopConfig loop;
  loop.max_ndofs = config.max_ndofs;
  loop.mark_fraction = config.mark_fraction;
  loop.fixed_point.tol = config.fp_tol;
  loop.fixed_point.max_iter = config.fp_max_iter;
  loop.fixed_point.damping = config.fp_auto_damping ? 1.0 : config.fp_damping;
  loop.fixed_point.auto_damping = config.fp_auto_damping;
  loop.fixed_point.cg.rel_tol = config.cg_tol;
  if (config.export_meshes) {
    loop.observer = [&](const LevelReport& level) {
      const std::string suffix = "_" + std::to_string(level.level) + ".dat";
      export_mesh(*level.mesh, config.output_dir / (config.problem + "_coor" + suffix),
                  config.output_dir / (config.problem + "_elem" + suffix));
    };
  }

  const LoopResult result = config.mode == RefinementMode::adaptive ? adaptive_loop(problem, initial, loop)
                                                                    : uniform_loop(problem, initial, loop);
  RunReport report;
  report.record = result.record;
  report.table_path = config.output_dir / table_filename(config);
  write_record(report.table_path, report.record);
  report.solver_failed = result.aborted;
  report.message = result.failure;
  return report;
}

}  // namespace bbafem
