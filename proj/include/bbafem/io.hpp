#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bbafem/adaptive.hpp"
#include "bbafem/fem.hpp"
#include "bbafem/mesh.hpp"

namespace bbafem {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Header line of the convergence tables.
std::string record_header();
std::string format_row(const ConvergenceRow& row);
void write_record(const std::filesystem::path& path, const ConvergenceRecord& record);

/// Whitespace-separated table with a header line; `nan` reads as NaN.
struct DataTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::vector<double> column(std::string_view name) const;
  bool has_column(std::string_view name) const;
};

DataTable read_table(const std::filesystem::path& path);
ConvergenceRecord to_record(const DataTable& table);

/// Aligned side-by-side table keyed by dofs, followed by fitted rates.
std::string render_table(const std::vector<DataTable>& tables, std::size_t last = 5);

/// "x y" per line and 1-based vertex triples per line.
void export_mesh(const TriangleMesh& mesh, const std::filesystem::path& coordinates, const std::filesystem::path& elements);
/// One coefficient per line, in vertex order.
void export_function(const FeFunction& f, const std::filesystem::path& path);

}  // namespace bbafem
