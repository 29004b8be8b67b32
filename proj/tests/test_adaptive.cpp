#include <cmath>

#include "bbafem/adaptive.hpp"
#include "doctest.h"

using namespace bbafem;

TEST_CASE("maximum marking") {
  const std::vector<double> e{1.0, 4.0, 2.0, 2.1, 0.5};
  CHECK(mark(e, 0.5) == std::vector<Index>{1, 3});
  CHECK(mark(e, 0.2) == std::vector<Index>{0, 1, 2, 3});
  // Strictly greater: an element exactly at the threshold is left alone.
  CHECK(mark(std::vector<double>{2.0, 1.0}, 0.5) == std::vector<Index>{0});
  // Equal positive values all exceed half the maximum.
  CHECK(mark(std::vector<double>{3.0, 3.0, 3.0}, 0.5) == std::vector<Index>{0, 1, 2});
  // All zero: the fallback marks every element attaining the maximum.
  CHECK(mark(std::vector<double>{0.0, 0.0}, 0.5) == std::vector<Index>{0, 1});
  CHECK_THROWS_AS(mark(std::vector<double>{}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(mark(e, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(mark(e, 1.0), std::invalid_argument);
}

TEST_CASE("rate fitting") {
  const std::vector<double> dofs{10, 100, 1000, 10000};
  const std::vector<double> vals{1.0, 0.1, 0.01, 0.001};
  CHECK(fit_rate(dofs, vals, 3) == doctest::Approx(-1.0));
  CHECK(fit_rate(dofs, vals, 10) == doctest::Approx(-1.0));
  const std::vector<double> half{1.0, std::pow(10.0, -0.5), 0.1, std::pow(10.0, -1.5)};
  CHECK(fit_rate(dofs, half, 4) == doctest::Approx(-0.5));
  CHECK_THROWS(fit_rate(std::vector<double>{1, 2}, std::vector<double>{1, 2}, 5));
  CHECK_THROWS(fit_rate(dofs, std::vector<double>{1.0, 0.0, 1.0, 1.0}, 4));
  CHECK_THROWS(fit_rate(dofs, std::vector<double>{1.0, 2.0}, 4));

  ConvergenceRecord rec;
  for (std::size_t i = 0; i < dofs.size(); ++i) {
    ConvergenceRow r;
    r.ndofs = static_cast<std::size_t>(dofs[i]);
    r.est_y = 3.0 * vals[i];
    rec.rows.push_back(r);
  }
  CHECK(fit_rate(rec, Column::est_y, 4) == doctest::Approx(-1.0));
  CHECK_THROWS(fit_rate(rec, Column::error_y, 4));  // NaN column
}

TEST_CASE("column names round trip") {
  for (std::size_t i = 0; i < kColumnNames.size(); ++i) CHECK(static_cast<std::size_t>(parse_column(kColumnNames[i])) == i);
  CHECK_THROWS_AS(parse_column("error_z"), std::invalid_argument);
}

TEST_CASE("row accessors") {
  ConvergenceRow r;
  CHECK_FALSE(r.has_errors());
  CHECK(std::isnan(r.get(Column::eff_index)));
  r.est_y = 3.0;
  r.est_p_2 = 12.0;
  r.est_p_inf = 4.0;
  CHECK(r.total_estimate() == doctest::Approx(13.0));
  r.error_y = r.error_p = r.error_u = 1.0;
  CHECK(r.has_errors());
}

TEST_CASE("uniform loop respects the dof budget and records consistent rows") {
  const ProblemSpec spec = problem_ex1();
  LoopConfig cfg;
  cfg.max_ndofs = 2000;
  cfg.fixed_point.auto_damping = true;
  cfg.keep_meshes = true;
  int observed = 0;
  cfg.observer = [&](const LevelReport& level) {
    CHECK(level.level == observed++);
    CHECK(level.indicators.size() == level.mesh->num_elements());
  };
  const LoopResult res = uniform_loop(spec, generate_domain(spec.domain, 4), cfg);
  CHECK_FALSE(res.aborted);
  REQUIRE(res.record.rows.size() == 4);  // 18, 98, 450, 1922 dofs
  CHECK(observed == 4);
  CHECK(res.meshes.size() == 4);
  std::size_t prev = 0;
  for (const auto& row : res.record.rows) {
    CHECK(row.ndofs > prev);
    CHECK(row.ndofs <= cfg.max_ndofs);
    prev = row.ndofs;
    CHECK(row.eff_index == doctest::Approx(effectivity(row.total_estimate(), row.error_y, row.error_p, row.error_u)));
  }
  CHECK(res.record.rows.back().ndofs == 1922);
  CHECK(res.final_solution.has_value());
}

TEST_CASE("adaptive loop refines and keeps dofs monotone") {
  const ProblemSpec spec = problem_ex2();
  LoopConfig cfg;
  cfg.max_ndofs = 1500;
  cfg.fixed_point.auto_damping = true;
  const LoopResult res = adaptive_loop(spec, generate_domain(spec.domain, 4), cfg);
  CHECK_FALSE(res.aborted);
  REQUIRE(res.record.rows.size() >= 4);
  for (std::size_t i = 1; i < res.record.rows.size(); ++i) CHECK(res.record.rows[i].ndofs > res.record.rows[i - 1].ndofs);
  CHECK(res.record.rows.back().ndofs <= cfg.max_ndofs);
}

TEST_CASE("warm and cold starts reach the same discrete solutions") {
  const ProblemSpec spec = problem_ex1();
  LoopConfig warm;
  warm.max_ndofs = 500;
  warm.fixed_point.auto_damping = true;
  LoopConfig cold = warm;
  cold.warm_start = false;
  const auto a = adaptive_loop(spec, generate_domain(spec.domain, 4), warm);
  const auto b = adaptive_loop(spec, generate_domain(spec.domain, 4), cold);
  REQUIRE(a.record.rows.size() == b.record.rows.size());
  for (std::size_t i = 0; i < a.record.rows.size(); ++i) {
    CHECK(a.record.rows[i].ndofs == b.record.rows[i].ndofs);
    CHECK(a.record.rows[i].est_y == doctest::Approx(b.record.rows[i].est_y).epsilon(1e-8));
  }
}

TEST_CASE("loop failures") {
  const ProblemSpec spec = problem_ex1();
  const MeshPtr m = generate_domain(spec.domain, 4);
  LoopConfig cfg;
  cfg.max_ndofs = 18;
  CHECK_THROWS_AS(uniform_loop(spec, m, cfg), std::invalid_argument);
  cfg.max_ndofs = 1000;
  cfg.fixed_point.max_iter = 1;
  const LoopResult r = uniform_loop(spec, m, cfg);
  CHECK(r.aborted);
  CHECK(r.failed_level == 0);
  CHECK(r.record.rows.size() == 1);
  CHECK(r.failure.find("level 0") != std::string::npos);
}
