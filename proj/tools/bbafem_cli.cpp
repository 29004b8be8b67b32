// Command-line driver: convergence studies and table comparison.
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bbafem/bbafem.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSolver = 1;
constexpr int kExitUsage = 2;

const char* const kColumns[] = {"error_y", "error_p", "error_u", "est_y", "est_p_2", "est_p_inf"};

int exit_code(bbafem_status s) {
  switch (s) {
    case BBAFEM_OK: return kExitOk;
    case BBAFEM_ERROR_SOLVER: return kExitSolver;
    default: return kExitUsage;
  }
}

void print_rates(const bbafem_record* record) {
  const size_t rows = bbafem_record_num_rows(record);
  const size_t last = rows < 5 ? rows : 5;
  std::printf("fitted rates (last %zu levels):\n", last);
  for (const char* column : kColumns) {
    double rate = 0.0;
    if (bbafem_record_fit_rate(record, column, last, &rate) == BBAFEM_OK)
      std::printf("  %-10s % .3f\n", column, rate);
    else
      std::printf("  %-10s n/a\n", column);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive FEM for bang-bang elliptic optimal control"};
  app.require_subcommand(1);

  bbafem_run_config cfg = bbafem_run_config_default();
  std::string problem = cfg.problem, mode = cfg.mode, out_dir = cfg.output_dir;
  bool export_meshes = false;
  auto* run = app.add_subcommand("run", "Run a convergence study and write errors_<problem>_<mode>.dat");
  run->add_option("--problem", problem, "ex1, ex2 or ex3")->required()->check(CLI::IsMember({"ex1", "ex2", "ex3"}));
  run->add_option("--mode", mode, "uniform or adaptive")->check(CLI::IsMember({"uniform", "adaptive"}))->capture_default_str();
  run->add_option("--max-dofs", cfg.max_ndofs, "Degree-of-freedom budget")->required();
  run->add_option("--mark-fraction", cfg.mark_fraction, "Maximum-strategy threshold")->capture_default_str();
  run->add_option("--cg-tol", cfg.cg_tol, "Relative CG tolerance")->capture_default_str();
  run->add_option("--fp-tol", cfg.fp_tol, "Fixed-point tolerance")->capture_default_str();
  run->add_option("--fp-max-iter", cfg.fp_max_iter, "Fixed-point iteration cap")->capture_default_str();
  std::string damping = "auto";
  run->add_option("--fp-damping", damping, "Carrier relaxation in (0, 1], or auto")->capture_default_str();
  run->add_option("--initial-n", cfg.initial_n, "Initial grid cells per unit length")->capture_default_str();
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_flag("--export-meshes", export_meshes, "Write the mesh of every level");
  run->add_option("--seed", cfg.seed, "Accepted for compatibility; studies are deterministic")->capture_default_str();

  std::vector<std::string> files;
  size_t last = 5;
  auto* table = app.add_subcommand("table", "Print a merged table of .dat files with fitted rates");
  table->add_option("files", files, "Tables written by run")->required();
  table->add_option("--last", last, "Rows shown and used for rate fits")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*run) {
    cfg.problem = problem.c_str();
    cfg.mode = mode.c_str();
    cfg.output_dir = out_dir.c_str();
    cfg.export_meshes = export_meshes ? 1 : 0;
    if (damping == "auto") {
      cfg.fp_auto_damping = 1;
    } else {
      cfg.fp_auto_damping = 0;
      try {
        cfg.fp_damping = std::stod(damping);
      } catch (const std::exception&) {
        std::fprintf(stderr, "error: --fp-damping expects a number or 'auto'\n");
        return kExitUsage;
      }
    }
    bbafem_record* record = nullptr;
    const bbafem_status s = bbafem_run(&cfg, &record);
    if (s != BBAFEM_OK) std::fprintf(stderr, "error: %s\n", bbafem_last_error());
    if (record != nullptr) {
      std::printf("wrote %s (%zu levels)\n", bbafem_record_table_path(record), bbafem_record_num_rows(record));
      print_rates(record);
      bbafem_record_free(record);
    }
    return exit_code(s);
  }

  std::vector<const char*> paths;
  for (const auto& f : files) paths.push_back(f.c_str());
  char* text = nullptr;
  const bbafem_status s = bbafem_table_render(paths.data(), paths.size(), last, &text);
  if (s != BBAFEM_OK) {
    std::fprintf(stderr, "error: %s\n", bbafem_last_error());
    return exit_code(s);
  }
  std::fputs(text, stdout);
  bbafem_string_free(text);
  return kExitOk;
}
