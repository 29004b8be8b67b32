#include "bbafem/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace bbafem {

namespace {

std::string format_value(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10e", v);
  return buf;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

}  // namespace

std::string record_header() {
  std::string h;
  for (std::size_t i = 0; i < kColumnNames.size(); ++i) {
    if (i) h += ' ';
    h += kColumnNames[i];
  }
  return h;
}

std::string format_row(const ConvergenceRow& row) {
  std::string s = std::to_string(row.ndofs);
  for (double v : {row.error_y, row.error_p, row.error_u, row.est_y, row.est_p_2, row.est_p_inf, row.eff_index, row.iota}) {
    s += ' ';
    s += format_value(v);
  }
  s += ' ';
  s += std::to_string(row.fp_iterations);
  return s;
}

void write_record(const std::filesystem::path& path, const ConvergenceRecord& record) {
  auto out = open_output(path);
  out << record_header() << '\n';
  for (const auto& row : record.rows) out << format_row(row) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<double> DataTable::column(std::string_view col) const {
  const auto it = std::find(columns.begin(), columns.end(), col);
  if (it == columns.end()) throw std::invalid_argument("table " + name + " has no column " + std::string(col));
  const auto idx = static_cast<std::size_t>(it - columns.begin());
  std::vector<double> out;
  for (const auto& r : rows) out.push_back(r[idx]);
  return out;
}

bool DataTable::has_column(std::string_view col) const {
  return std::find(columns.begin(), columns.end(), col) != columns.end();
}

DataTable read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  DataTable table;
  table.name = path.stem().string();
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::vector<std::string> tokens;
    for (std::string tok; ss >> tok;) tokens.push_back(tok);
    if (tokens.empty()) continue;
    if (table.columns.empty()) {
      table.columns = std::move(tokens);
      continue;
    }
    if (tokens.size() != table.columns.size())
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected " + std::to_string(table.columns.size()) +
                    " columns, found " + std::to_string(tokens.size()));
    std::vector<double> row;
    for (const auto& tok : tokens) {
      if (tok == "nan" || tok == "-nan") {
        row.push_back(std::nan(""));
        continue;
      }
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size()) throw IoError(path.string() + ":" + std::to_string(lineno) + ": malformed number '" + tok + "'");
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  if (table.columns.empty()) throw IoError(path.string() + " is empty");
  if (table.rows.empty()) throw IoError(path.string() + " has no data rows");
  if (table.columns.front() != "dofs") throw IoError(path.string() + ": first column must be dofs");
  return table;
}

ConvergenceRecord to_record(const DataTable& table) {
  ConvergenceRecord rec;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    ConvergenceRow row;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      const double v = table.rows[r][c];
      switch (parse_column(table.columns[c])) {
        case Column::dofs: row.ndofs = static_cast<std::size_t>(v); break;
        case Column::error_y: row.error_y = v; break;
        case Column::error_p: row.error_p = v; break;
        case Column::error_u: row.error_u = v; break;
        case Column::est_y: row.est_y = v; break;
        case Column::est_p_2: row.est_p_2 = v; break;
        case Column::est_p_inf: row.est_p_inf = v; break;
        case Column::eff_index: row.eff_index = v; break;
        case Column::iota: row.iota = v; break;
        case Column::fp_iters: row.fp_iterations = static_cast<int>(v); break;
      }
    }
    rec.rows.push_back(row);
  }
  return rec;
}

std::string render_table(const std::vector<DataTable>& tables, std::size_t last) {
  if (tables.empty()) throw std::invalid_argument("no tables to render");
  const bool prefix = tables.size() > 1;

  // Header: dofs, then every non-dofs column of every table.
  std::vector<std::string> header{"dofs"};
  for (const auto& t : tables)
    for (std::size_t c = 1; c < t.columns.size(); ++c) header.push_back(prefix ? t.name + ":" + t.columns[c] : t.columns[c]);

  std::map<double, std::vector<std::string>> merged;
  std::size_t offset = 0;
  for (const auto& t : tables) {
    const std::size_t width = t.columns.size() - 1;
    for (const auto& row : t.rows) {
      auto& cells = merged[row[0]];
      cells.resize(header.size() - 1, "-");
      for (std::size_t c = 1; c < t.columns.size(); ++c) {
        char buf[32];
        if (std::isnan(row[c])) std::snprintf(buf, sizeof buf, "nan");
        else std::snprintf(buf, sizeof buf, "%.4e", row[c]);
        cells[offset + c - 1] = buf;
      }
    }
    offset += width;
  }
  for (auto& [dofs, cells] : merged) cells.resize(header.size() - 1, "-");

  std::vector<std::size_t> widths(header.size());
  for (std::size_t i = 0; i < header.size(); ++i) widths[i] = std::max<std::size_t>(header[i].size(), 10);
  auto pad = [](const std::string& s, std::size_t w) { return std::string(w > s.size() ? w - s.size() : 0, ' ') + s; };

  std::ostringstream out;
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "  " : "") << pad(header[i], widths[i]);
  out << '\n';
  for (const auto& [dofs, cells] : merged) {
    out << pad(std::to_string(static_cast<long long>(dofs)), widths[0]);
    for (std::size_t i = 0; i < cells.size(); ++i) out << "  " << pad(cells[i], widths[i + 1]);
    out << '\n';
  }

  out << "\nfitted rates (log value vs log dofs, last " << last << " rows)\n";
  for (const auto& t : tables) {
    const auto dofs = t.column("dofs");
    for (std::size_t c = 1; c < t.columns.size(); ++c) {
      if (t.columns[c] == "fp_iters" || t.columns[c] == "iota" || t.columns[c] == "eff_index") continue;
      const std::string label = prefix ? t.name + ":" + t.columns[c] : t.columns[c];
      std::vector<double> values;
      for (const auto& r : t.rows) values.push_back(r[c]);
      char buf[64];
      try {
        std::snprintf(buf, sizeof buf, "%.3f", fit_rate(dofs, values, last));
      } catch (const std::exception&) {
        std::snprintf(buf, sizeof buf, "n/a");
      }
      out << "  " << label << ' ' << buf << '\n';
    }
  }
  return out.str();
}

void export_mesh(const TriangleMesh& mesh, const std::filesystem::path& coordinates, const std::filesystem::path& elements) {
  {
    auto out = open_output(coordinates);
    for (const auto& p : mesh.vertices()) out << format_value(p.x) << ' ' << format_value(p.y) << '\n';
    if (!out) throw IoError("failed writing " + coordinates.string());
  }
  auto out = open_output(elements);
  for (const auto& tri : mesh.elements()) out << tri[0] + 1 << ' ' << tri[1] + 1 << ' ' << tri[2] + 1 << '\n';
  if (!out) throw IoError("failed writing " + elements.string());
}

void export_function(const FeFunction& f, const std::filesystem::path& path) {
  auto out = open_output(path);
  for (double v : f.coefficients) out << format_value(v) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace bbafem
