#include "bbafem/ocp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bbafem {

ControlBounds::ControlBounds(double a, double b) : lower(a), upper(b) {
  if (!(a < b)) throw std::invalid_argument("control bounds require a < b");
}

namespace {

Sign sign_of(double v) { return v > 0.0 ? Sign::positive : (v < 0.0 ? Sign::negative : Sign::zero); }

SignRegion make_region(Point2 a, Point2 b, Point2 c, Sign s) {
  return {{a, b, c}, s, std::abs(signed_area(a, b, c))};
}

Point2 zero_crossing(Point2 a, Point2 b, double fa, double fb) {
  const double t = fa / (fa - fb);
  return a + t * (b - a);
}

}  // namespace

std::vector<SignRegion> partition_by_linear(const std::array<Point2, 3>& c, const std::array<double, 3>& f) {
  int pos = 0, neg = 0;
  for (double v : f) {
    pos += v > 0.0;
    neg += v < 0.0;
  }
  if (pos == 0 || neg == 0) {
    const Sign s = pos > 0 ? Sign::positive : (neg > 0 ? Sign::negative : Sign::zero);
    return {make_region(c[0], c[1], c[2], s)};
  }
  // A zero vertex with opposite signs at the other two: one cut through it.
  for (int k = 0; k < 3; ++k) {
    if (f[k] != 0.0) continue;
    const int i = (k + 1) % 3, j = (k + 2) % 3;
    const Point2 q = zero_crossing(c[i], c[j], f[i], f[j]);
    return {make_region(c[k], c[i], q, sign_of(f[i])), make_region(c[k], q, c[j], sign_of(f[j]))};
  }
  // The lone vertex has the sign the other two do not share.
  int lone = 0;
  for (int k = 0; k < 3; ++k) {
    if (sign_of(f[k]) != sign_of(f[(k + 1) % 3]) && sign_of(f[k]) != sign_of(f[(k + 2) % 3])) lone = k;
  }
  const int i = (lone + 1) % 3, j = (lone + 2) % 3;
  const Point2 qi = zero_crossing(c[lone], c[i], f[lone], f[i]);
  const Point2 qj = zero_crossing(c[lone], c[j], f[lone], f[j]);
  const Sign s = sign_of(f[lone]);
  const Sign other = sign_of(f[i]);
  return {make_region(c[lone], qi, qj, s), make_region(qi, c[i], c[j], other), make_region(qi, c[j], qj, other)};
}

SignPartition sign_partition(const FeFunction& p, Index t) {
  return {t, partition_by_linear(p.mesh->corners(t), p.local(t))};
}

BangBangControl::BangBangControl(ControlBounds b, FeFunction c)
    : bounds(b), carrier(std::move(c)), zero_value(b.midpoint()) {}

BangBangControl::BangBangControl(ControlBounds b, FeFunction c, double z)
    : bounds(b), carrier(std::move(c)), zero_value(z) {
  if (z < b.lower || z > b.upper) throw std::invalid_argument("zero-set control value outside the bounds");
}

double BangBangControl::value(Sign s) const {
  switch (s) {
    case Sign::positive: return bounds.lower;
    case Sign::negative: return bounds.upper;
    case Sign::zero: return zero_value;
  }
  return zero_value;
}

double BangBangControl::value(double carrier_value) const { return value(sign_of(carrier_value)); }

double BangBangControl::value_at(Index t, const std::array<double, 3>& bary) const {
  return value(carrier.evaluate(t, bary));
}

ControlIntegrals control_integrals(const BangBangControl& control, Index t) {
  const TriangleMesh& mesh = *control.carrier.mesh;
  const auto corners = mesh.corners(t);
  const auto grads = hat_gradients(mesh, t);
  ControlIntegrals out{{0.0, 0.0, 0.0}, 0.0};
  for (const auto& r : sign_partition(control.carrier, t).regions) {
    const double u = control.value(r.sign);
    const Point2 mid = (1.0 / 3.0) * (r.corners[0] + r.corners[1] + r.corners[2]);
    // Hat functions are linear, so their region integral is area times centroid value.
    for (int i = 0; i < 3; ++i) {
      const double phi = (i == 0 ? 1.0 : 0.0) + dot(grads[i], mid - corners[0]);
      out.moments[i] += u * r.area * phi;
    }
    out.l2sq += u * u * r.area;
  }
  return out;
}

std::vector<double> control_load(const BangBangControl& control) {
  const TriangleMesh& mesh = *control.carrier.mesh;
  std::vector<double> load(mesh.num_vertices(), 0.0);
  for (std::size_t t = 0; t < mesh.num_elements(); ++t) {
    const auto ti = static_cast<Index>(t);
    const auto& tri = mesh.elements()[t];
    const auto c = control.carrier.local(ti);
    std::array<double, 3> m;
    if (c[0] > 0.0 && c[1] > 0.0 && c[2] > 0.0) {
      m.fill(control.bounds.lower * mesh.area(ti) / 3.0);
    } else if (c[0] < 0.0 && c[1] < 0.0 && c[2] < 0.0) {
      m.fill(control.bounds.upper * mesh.area(ti) / 3.0);
    } else {
      m = control_integrals(control, ti).moments;
    }
    for (int i = 0; i < 3; ++i) load[tri[i]] += m[i];
  }
  return load;
}

double control_l1_distance(const BangBangControl& u1, const BangBangControl& u2) {
  const TriangleMesh& mesh = *u1.carrier.mesh;
  if (u2.carrier.mesh.get() != &mesh) throw std::invalid_argument("controls live on different meshes");
  double sum = 0.0;
  for (std::size_t t = 0; t < mesh.num_elements(); ++t) {
    const auto ti = static_cast<Index>(t);
    const auto c1 = u1.carrier.local(ti);
    const auto c2 = u2.carrier.local(ti);
    auto strict = [](const std::array<double, 3>& c) {
      if (c[0] > 0.0 && c[1] > 0.0 && c[2] > 0.0) return Sign::positive;
      if (c[0] < 0.0 && c[1] < 0.0 && c[2] < 0.0) return Sign::negative;
      return Sign::zero;
    };
    const Sign s1 = strict(c1), s2 = strict(c2);
    if (s1 != Sign::zero && s2 != Sign::zero) {
      sum += std::abs(u1.value(s1) - u2.value(s2)) * mesh.area(ti);
      continue;
    }
    const auto corners = mesh.corners(ti);
    const Point2 g2 = u2.carrier.gradient(ti);
    for (const auto& r : partition_by_linear(corners, c1)) {
      const std::array<double, 3> v2{c2[0] + dot(g2, r.corners[0] - corners[0]), c2[0] + dot(g2, r.corners[1] - corners[0]),
                                     c2[0] + dot(g2, r.corners[2] - corners[0])};
      const double a = u1.value(r.sign);
      for (const auto& sub : partition_by_linear(r.corners, v2)) sum += std::abs(a - u2.value(sub.sign)) * sub.area;
    }
  }
  return sum;
}

OptimalitySystem::OptimalitySystem(const ProblemSpec& problem, MeshPtr mesh, const CgOptions& cg)
    : problem_(&problem),
      mesh_(std::move(mesh)),
      stiffness_(assemble_stiffness(*mesh_)),
      mass_(assemble_mass(*mesh_)),
      solver_(mesh_, stiffness_, cg) {
  const QuadratureRule& rule = degree19_rule();
  forcing_load_ = problem.forcing ? assemble_load(*mesh_, problem.forcing, rule)
                                  : std::vector<double>(mesh_->num_vertices(), 0.0);
  desired_load_ = assemble_load(*mesh_, problem.desired_state, rule);
}

FeFunction OptimalitySystem::solve_state(const BangBangControl& control, std::span<const double> guess) const {
  std::vector<double> rhs = control_load(control);
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += forcing_load_[i];
  return solver_.solve(rhs, guess);
}

FeFunction OptimalitySystem::solve_adjoint(const FeFunction& state, std::span<const double> guess) const {
  std::vector<double> rhs = mass_.multiply(state.coefficients);
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] -= desired_load_[i];
  return solver_.solve(rhs, guess);
}

OcpSolution fixed_point_solve(const ProblemSpec& problem, MeshPtr mesh, const FixedPointOptions& options,
                              const FixedPointGuess* guess) {
  if (!(options.tol > 0.0)) throw std::invalid_argument("fixed-point tolerance must be positive");
  if (options.max_iter < 1) throw std::invalid_argument("fixed-point iteration cap must be positive");
  if (!(options.damping > 0.0 && options.damping <= 1.0)) throw std::invalid_argument("damping must lie in (0, 1]");
  if (!problem.desired_state) throw std::invalid_argument("problem has no desired state");

  const OptimalitySystem system(problem, mesh, options.cg);
  const ControlBounds bounds = problem.bounds;
  const std::size_t nv = mesh->num_vertices();

  std::vector<double> carrier(nv, 0.0);
  std::vector<double> y_guess, p_guess;
  if (guess != nullptr && guess->carrier.size() == nv) {
    carrier = guess->carrier;
    if (guess->state.size() == nv) y_guess = guess->state;
    if (guess->adjoint.size() == nv) p_guess = guess->adjoint;
  } else if (options.initial == InitialControl::lower) {
    carrier.assign(nv, 1.0);
  } else if (options.initial == InitialControl::upper) {
    carrier.assign(nv, -1.0);
  }

  const double threshold = options.tol * bounds.width() * mesh->total_area();
  OcpSolution out{FeFunction::zero(mesh), FeFunction::zero(mesh), BangBangControl(bounds, FeFunction::zero(mesh)), 0, false,
                  false, {}, 0};
  double prev_y_energy = -1.0, prev_p_energy = -1.0;
  double theta = options.damping;
  bool tuned = !options.auto_damping;
  for (int k = 1; k <= options.max_iter; ++k) {
    const BangBangControl current(bounds, FeFunction{mesh, carrier});
    FeFunction y = system.solve_state(current, y_guess);
    out.cg_iterations += system.last_cg_iterations();
    FeFunction p = system.solve_adjoint(y, p_guess);
    out.cg_iterations += system.last_cg_iterations();
    BangBangControl next(bounds, p);
    const double increment = control_l1_distance(next, current);
    out.increments.push_back(increment);
    out.iterations = k;

    // Stagnation: state and adjoint fixed while the control still moves.
    bool stagnant = false;
    if (!y_guess.empty() && !p_guess.empty()) {
      std::vector<double> dy(nv), dp(nv);
      for (std::size_t i = 0; i < nv; ++i) {
        dy[i] = y.coefficients[i] - y_guess[i];
        dp[i] = p.coefficients[i] - p_guess[i];
      }
      const double ey = energy_norm(system.stiffness(), dy), ep = energy_norm(system.stiffness(), dp);
      stagnant = prev_y_energy >= 0.0 && ey <= 1e-12 * prev_y_energy && ep <= 1e-12 * prev_p_energy;
    }
    prev_y_energy = energy_norm(system.stiffness(), y.coefficients);
    prev_p_energy = energy_norm(system.stiffness(), p.coefficients);

    y_guess = y.coefficients;
    p_guess = p.coefficients;
    out.state = std::move(y);
    out.adjoint = p;
    out.control = std::move(next);
    if (increment <= threshold) {
      out.converged = true;
      break;
    }
    if (stagnant) {
      out.converged = true;
      out.non_unique = true;
      break;
    }
    // The carrier map is antitone, so its linearization has spectrum in
    // [-L, 0] and plain substitution contracts like L. Relaxation by
    // 2 / (2 + L) shrinks that to L / (2 + L).
    const auto& inc = out.increments;
    if (!tuned && k >= 3 && inc[k - 3] > 0.0 && inc[k - 2] > 0.0) {
      const double rate = std::max(inc[k - 1] / inc[k - 2], inc[k - 2] / inc[k - 3]);
      if (rate > 0.5) {
        theta = std::min(theta, 2.0 / (2.0 + rate));
        tuned = true;
      }
    }
    if (theta == 1.0) {
      carrier = p.coefficients;
    } else {
      for (std::size_t i = 0; i < nv; ++i) carrier[i] = theta * p.coefficients[i] + (1.0 - theta) * carrier[i];
    }
  }
  out.damping = theta;
  return out;
}

}  // namespace bbafem
