#include <filesystem>
#include <fstream>
#include <sstream>

#include "bbafem/io.hpp"
#include "doctest.h"

using namespace bbafem;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "bbafem_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

void write_text(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string read_text(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ConvergenceRecord sample_record(bool with_errors) {
  ConvergenceRecord rec;
  for (int k = 0; k < 4; ++k) {
    ConvergenceRow r;
    r.ndofs = 10u << (2 * k);
    const double s = 1.0 / static_cast<double>(r.ndofs);
    r.est_y = 2.0 * s;
    r.est_p_2 = 3.0 * s;
    r.est_p_inf = 4.0 * s;
    r.iota = 0.5 * k;
    r.fp_iterations = 3 + k;
    if (with_errors) {
      r.error_y = s;
      r.error_p = 0.5 * s;
      r.error_u = 0.25 * s;
      r.eff_index = r.total_estimate() / std::sqrt(r.error_y * r.error_y + r.error_p * r.error_p + r.error_u * r.error_u);
    }
    rec.rows.push_back(r);
  }
  return rec;
}

}  // namespace

TEST_CASE("record header and row formatting") {
  CHECK(record_header() == "dofs error_y error_p error_u est_y est_p_2 est_p_inf eff_index iota fp_iters");
  ConvergenceRow r;
  r.ndofs = 18;
  r.est_y = 0.25;
  r.fp_iterations = 7;
  const std::string line = format_row(r);
  CHECK(line.rfind("18 nan nan nan 2.5000000000e-01 ", 0) == 0);
  CHECK(line.substr(line.size() - 2) == " 7");
}

TEST_CASE("tables round trip") {
  const fs::path p = scratch("errors_rt.dat");
  const ConvergenceRecord rec = sample_record(true);
  write_record(p, rec);
  const DataTable t = read_table(p);
  CHECK(t.name == "errors_rt");
  CHECK(t.columns.size() == 10);
  REQUIRE(t.rows.size() == 4);
  const ConvergenceRecord back = to_record(t);
  for (std::size_t i = 0; i < rec.rows.size(); ++i) {
    CHECK(back.rows[i].ndofs == rec.rows[i].ndofs);
    CHECK(back.rows[i].error_u == doctest::Approx(rec.rows[i].error_u).epsilon(1e-9));
    CHECK(back.rows[i].fp_iterations == rec.rows[i].fp_iterations);
  }
  const fs::path q = scratch("errors_nan.dat");
  write_record(q, sample_record(false));
  CHECK(std::isnan(read_table(q).column("error_y")[0]));
  CHECK_THROWS(read_table(q).column("missing"));
}

TEST_CASE("malformed tables are rejected") {
  const fs::path empty = scratch("empty.dat");
  write_text(empty, "");
  CHECK_THROWS_AS(read_table(empty), IoError);
  const fs::path header_only = scratch("header.dat");
  write_text(header_only, "dofs est_y\n");
  CHECK_THROWS_AS(read_table(header_only), IoError);
  const fs::path mismatch = scratch("mismatch.dat");
  write_text(mismatch, "dofs est_y\n10 1.0\n20 0.5 0.3\n");
  CHECK_THROWS_AS(read_table(mismatch), IoError);
  const fs::path junk = scratch("junk.dat");
  write_text(junk, "dofs est_y\n10 abc\n");
  CHECK_THROWS_AS(read_table(junk), IoError);
  const fs::path order = scratch("order.dat");
  write_text(order, "est_y dofs\n1 10\n");
  CHECK_THROWS_AS(read_table(order), IoError);
  CHECK_THROWS_AS(read_table(scratch("does_not_exist.dat")), IoError);
}

TEST_CASE("rendering one table prints the exact fitted rate") {
  const fs::path p = scratch("slope.dat");
  write_text(p, "dofs est_y\n10 1.0\n100 0.1\n1000 0.01\n");
  const std::string out = render_table({read_table(p)}, 5);
  CHECK(out.find("est_y") != std::string::npos);
  CHECK(out.find("-1.000") != std::string::npos);
  CHECK(out.find("slope:") == std::string::npos);
}

TEST_CASE("rendering two tables merges rows by dofs") {
  const fs::path a = scratch("a.dat"), b = scratch("b.dat");
  write_text(a, "dofs est_y\n10 1.0\n100 0.1\n1000 0.01\n");
  write_text(b, "dofs est_y\n10 2.0\n50 0.4\n1000 0.02\n");
  const std::string out = render_table({read_table(a), read_table(b)}, 5);
  CHECK(out.find("a:est_y") != std::string::npos);
  CHECK(out.find("b:est_y") != std::string::npos);
  // Row 50 exists only in b, so a's cell is a dash.
  std::istringstream lines(out);
  std::string line;
  bool found = false;
  while (std::getline(lines, line)) {
    std::istringstream cells(line);
    std::string first, second;
    cells >> first >> second;
    if (first == "50") {
      found = true;
      CHECK(second == "-");
    }
  }
  CHECK(found);
}

TEST_CASE("mesh export uses one-based element indices") {
  const auto m = generate_domain(DomainId::unit_square, 1);
  const fs::path c = scratch("m_coor_0.dat"), e = scratch("m_elem_0.dat");
  export_mesh(*m, c, e);
  std::istringstream elems(read_text(e));
  int a, b, d, count = 0, lo = 100, hi = 0;
  while (elems >> a >> b >> d) {
    ++count;
    lo = std::min({lo, a, b, d});
    hi = std::max({hi, a, b, d});
  }
  CHECK(count == 2);
  CHECK(lo == 1);
  CHECK(hi == 4);
  std::istringstream coords(read_text(c));
  double x, y;
  int nv = 0;
  while (coords >> x >> y) ++nv;
  CHECK(nv == 4);
}
