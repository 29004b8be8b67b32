#include "bbafem/bbafem.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "bbafem/adaptive.hpp"
#include "bbafem/benchmarks.hpp"
#include "bbafem/io.hpp"
#include "bbafem/study.hpp"

struct bbafem_mesh {
  bbafem::MeshPtr mesh;
};

struct bbafem_problem {
  bbafem::ProblemSpec spec;
};

struct bbafem_solution {
  bbafem::LevelOutcome outcome;
};

struct bbafem_record {
  bbafem::ConvergenceRecord record;
  std::string table_path;
};

namespace {

thread_local std::string g_last_error;

bbafem_status fail(bbafem_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Maps exceptions from the C++ core onto status codes.
template <class F>
bbafem_status guarded(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const bbafem::SolverError& e) {
    return fail(BBAFEM_ERROR_SOLVER, e.what());
  } catch (const bbafem::IoError& e) {
    return fail(BBAFEM_ERROR_IO, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(BBAFEM_ERROR_INVALID_ARGUMENT, e.what());
  } catch (const std::out_of_range& e) {
    return fail(BBAFEM_ERROR_INVALID_ARGUMENT, e.what());
  } catch (const std::domain_error& e) {
    return fail(BBAFEM_ERROR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(BBAFEM_ERROR_INTERNAL, e.what());
  } catch (...) {
    return fail(BBAFEM_ERROR_INTERNAL, "unknown error");
  }
}

#define BBAFEM_REQUIRE(cond, what) \
  if (!(cond)) return fail(BBAFEM_ERROR_INVALID_ARGUMENT, what)

}  // namespace

extern "C" {

const char* bbafem_last_error(void) { return g_last_error.c_str(); }
const char* bbafem_version(void) { return "1.0.0"; }

bbafem_status bbafem_mesh_generate(const char* domain, int n, bbafem_mesh** out) {
  BBAFEM_REQUIRE(domain && out, "null argument");
  return guarded([&] {
    *out = new bbafem_mesh{bbafem::generate_domain(bbafem::parse_domain(domain), n)};
    return BBAFEM_OK;
  });
}

void bbafem_mesh_free(bbafem_mesh* mesh) { delete mesh; }
size_t bbafem_mesh_num_vertices(const bbafem_mesh* mesh) { return mesh ? mesh->mesh->num_vertices() : 0; }
size_t bbafem_mesh_num_elements(const bbafem_mesh* mesh) { return mesh ? mesh->mesh->num_elements() : 0; }
size_t bbafem_mesh_ndofs(const bbafem_mesh* mesh) { return mesh ? bbafem::count_ndofs(*mesh->mesh) : 0; }
double bbafem_mesh_total_area(const bbafem_mesh* mesh) { return mesh ? mesh->mesh->total_area() : 0.0; }

bbafem_status bbafem_mesh_vertices(const bbafem_mesh* mesh, double* xy, size_t capacity) {
  BBAFEM_REQUIRE(mesh && xy, "null argument");
  BBAFEM_REQUIRE(capacity >= 2 * mesh->mesh->num_vertices(), "vertex buffer too small");
  for (std::size_t v = 0; v < mesh->mesh->num_vertices(); ++v) {
    xy[2 * v] = mesh->mesh->vertices()[v].x;
    xy[2 * v + 1] = mesh->mesh->vertices()[v].y;
  }
  return BBAFEM_OK;
}

bbafem_status bbafem_mesh_elements(const bbafem_mesh* mesh, int32_t* tri, size_t capacity) {
  BBAFEM_REQUIRE(mesh && tri, "null argument");
  BBAFEM_REQUIRE(capacity >= 3 * mesh->mesh->num_elements(), "element buffer too small");
  for (std::size_t t = 0; t < mesh->mesh->num_elements(); ++t)
    for (int k = 0; k < 3; ++k) tri[3 * t + k] = mesh->mesh->elements()[t][k];
  return BBAFEM_OK;
}

bbafem_status bbafem_mesh_bisect(const bbafem_mesh* mesh, const int32_t* marked, size_t count, bbafem_mesh** out) {
  BBAFEM_REQUIRE(mesh && marked && out, "null argument");
  return guarded([&] {
    *out = new bbafem_mesh{bbafem::bisect(*mesh->mesh, std::span<const int32_t>(marked, count))};
    return BBAFEM_OK;
  });
}

bbafem_status bbafem_mesh_uniform_refine(const bbafem_mesh* mesh, bbafem_mesh** out) {
  BBAFEM_REQUIRE(mesh && out, "null argument");
  return guarded([&] {
    *out = new bbafem_mesh{bbafem::uniform_refine(*mesh->mesh)};
    return BBAFEM_OK;
  });
}

bbafem_status bbafem_mesh_export(const bbafem_mesh* mesh, const char* coordinates_path, const char* elements_path) {
  BBAFEM_REQUIRE(mesh && coordinates_path && elements_path, "null argument");
  return guarded([&] {
    bbafem::export_mesh(*mesh->mesh, coordinates_path, elements_path);
    return BBAFEM_OK;
  });
}

bbafem_status bbafem_problem_create(const char* name, bbafem_problem** out) {
  BBAFEM_REQUIRE(name && out, "null argument");
  return guarded([&] {
    *out = new bbafem_problem{bbafem::make_problem(name)};
    return BBAFEM_OK;
  });
}

void bbafem_problem_free(bbafem_problem* problem) { delete problem; }

const char* bbafem_problem_domain(const bbafem_problem* problem) {
  return problem ? bbafem::domain_name(problem->spec.domain).data() : "";
}

int bbafem_problem_has_exact(const bbafem_problem* problem) { return problem && problem->spec.exact ? 1 : 0; }

bbafem_solver_options bbafem_solver_options_default(void) {
  const bbafem::FixedPointOptions d;
  return {d.tol, d.max_iter, d.damping, d.auto_damping ? 1 : 0, d.cg.rel_tol};
}

bbafem_status bbafem_solve(const bbafem_problem* problem, const bbafem_mesh* mesh, const bbafem_solver_options* options,
                           bbafem_solution** out) {
  BBAFEM_REQUIRE(problem && mesh && out, "null argument");
  return guarded([&] {
    bbafem::FixedPointOptions fp;
    if (options) {
      fp.tol = options->fp_tol;
      fp.max_iter = options->fp_max_iter;
      fp.damping = options->damping;
      fp.auto_damping = options->auto_damping != 0;
      fp.cg.rel_tol = options->cg_tol;
    }
    auto outcome = bbafem::solve_level(problem->spec, mesh->mesh, fp);
    if (!outcome.solution.converged)
      return fail(BBAFEM_ERROR_SOLVER,
                  "fixed-point iteration did not converge in " + std::to_string(outcome.solution.iterations) + " iterations");
    *out = new bbafem_solution{std::move(outcome)};
    return BBAFEM_OK;
  });
}

void bbafem_solution_free(bbafem_solution* solution) { delete solution; }

bbafem_status bbafem_solution_info_get(const bbafem_solution* solution, bbafem_solution_info* info) {
  BBAFEM_REQUIRE(solution && info, "null argument");
  const auto& o = solution->outcome;
  info->converged = o.solution.converged ? 1 : 0;
  info->iterations = o.solution.iterations;
  info->ndofs = o.row.ndofs;
  info->est_y = o.row.est_y;
  info->est_p_2 = o.row.est_p_2;
  info->est_p_inf = o.row.est_p_inf;
  info->total_estimate = o.estimate.total;
  info->iota = o.row.iota;
  info->error_y = o.row.error_y;
  info->error_p = o.row.error_p;
  info->error_u = o.row.error_u;
  info->eff_index = o.row.eff_index;
  return BBAFEM_OK;
}

namespace {

bbafem_status copy_values(const std::vector<double>& src, double* dst, size_t capacity) {
  BBAFEM_REQUIRE(dst, "null argument");
  BBAFEM_REQUIRE(capacity >= src.size(), "output buffer too small");
  std::memcpy(dst, src.data(), src.size() * sizeof(double));
  return BBAFEM_OK;
}

}  // namespace

bbafem_status bbafem_solution_state(const bbafem_solution* solution, double* values, size_t capacity) {
  BBAFEM_REQUIRE(solution, "null argument");
  return copy_values(solution->outcome.solution.state.coefficients, values, capacity);
}

bbafem_status bbafem_solution_adjoint(const bbafem_solution* solution, double* values, size_t capacity) {
  BBAFEM_REQUIRE(solution, "null argument");
  return copy_values(solution->outcome.solution.adjoint.coefficients, values, capacity);
}

bbafem_status bbafem_solution_indicators(const bbafem_solution* solution, double* values, size_t capacity) {
  BBAFEM_REQUIRE(solution, "null argument");
  return copy_values(solution->outcome.indicators.total, values, capacity);
}

bbafem_status bbafem_mark(const double* indicators, size_t count, double fraction, int32_t* marked, size_t* marked_count) {
  BBAFEM_REQUIRE(indicators && marked && marked_count, "null argument");
  return guarded([&] {
    const auto ids = bbafem::mark(std::span<const double>(indicators, count), fraction);
    std::copy(ids.begin(), ids.end(), marked);
    *marked_count = ids.size();
    return BBAFEM_OK;
  });
}

bbafem_status bbafem_fit_rate(const double* dofs, const double* values, size_t count, size_t last, double* rate) {
  BBAFEM_REQUIRE(dofs && values && rate, "null argument");
  return guarded([&] {
    *rate = bbafem::fit_rate(std::span<const double>(dofs, count), std::span<const double>(values, count), last);
    return BBAFEM_OK;
  });
}

bbafem_run_config bbafem_run_config_default(void) {
  const bbafem::RunConfig d;
  return {"ex1", "adaptive", d.max_ndofs, d.mark_fraction, d.cg_tol, d.fp_tol, d.fp_max_iter, d.fp_damping, d.fp_auto_damping ? 1 : 0, d.initial_n, ".", 0, d.seed};
}

bbafem_status bbafem_run(const bbafem_run_config* config, bbafem_record** out) {
  BBAFEM_REQUIRE(config && out, "null argument");
  BBAFEM_REQUIRE(config->problem && config->mode && config->output_dir, "null string in run configuration");
  return guarded([&] {
    bbafem::RunConfig rc;
    rc.problem = config->problem;
    rc.mode = bbafem::parse_mode(config->mode);
    rc.max_ndofs = config->max_ndofs;
    rc.mark_fraction = config->mark_fraction;
    rc.cg_tol = config->cg_tol;
    rc.fp_tol = config->fp_tol;
    rc.fp_max_iter = config->fp_max_iter;
    rc.fp_damping = config->fp_damping;
    rc.fp_auto_damping = config->fp_auto_damping != 0;
    rc.initial_n = config->initial_n;
    rc.output_dir = config->output_dir;
    rc.export_meshes = config->export_meshes != 0;
    rc.seed = config->seed;
    bbafem::RunReport report = bbafem::run_study(rc);
    *out = new bbafem_record{std::move(report.record), report.table_path.string()};
    if (report.solver_failed) return fail(BBAFEM_ERROR_SOLVER, report.message);
    return BBAFEM_OK;
  });
}

void bbafem_record_free(bbafem_record* record) { delete record; }
size_t bbafem_record_num_rows(const bbafem_record* record) { return record ? record->record.rows.size() : 0; }

bbafem_status bbafem_record_value(const bbafem_record* record, size_t row, const char* column, double* value) {
  BBAFEM_REQUIRE(record && column && value, "null argument");
  BBAFEM_REQUIRE(row < record->record.rows.size(), "row index out of range");
  return guarded([&] {
    *value = record->record.rows[row].get(bbafem::parse_column(column));
    return BBAFEM_OK;
  });
}

bbafem_status bbafem_record_fit_rate(const bbafem_record* record, const char* column, size_t last, double* rate) {
  BBAFEM_REQUIRE(record && column && rate, "null argument");
  return guarded([&] {
    *rate = bbafem::fit_rate(record->record, bbafem::parse_column(column), last);
    return BBAFEM_OK;
  });
}

const char* bbafem_record_table_path(const bbafem_record* record) { return record ? record->table_path.c_str() : ""; }

bbafem_status bbafem_table_render(const char* const* paths, size_t count, size_t last, char** out) {
  BBAFEM_REQUIRE(paths && out, "null argument");
  BBAFEM_REQUIRE(count > 0, "no table files given");
  return guarded([&] {
    std::vector<bbafem::DataTable> tables;
    for (size_t i = 0; i < count; ++i) {
      BBAFEM_REQUIRE(paths[i], "null path");
      tables.push_back(bbafem::read_table(paths[i]));
    }
    const std::string text = bbafem::render_table(tables, last);
    char* buf = new char[text.size() + 1];
    std::memcpy(buf, text.c_str(), text.size() + 1);
    *out = buf;
    return BBAFEM_OK;
  });
}

void bbafem_string_free(char* text) { delete[] text; }

}  // extern "C"
