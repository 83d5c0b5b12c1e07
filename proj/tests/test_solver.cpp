#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "pmeflow/error.hpp"
#include "pmeflow/operators.hpp"
#include "pmeflow/solver.hpp"

using namespace pmeflow;

namespace {

ManifoldPtr circle(int n, WeightKind phi = WeightKind::zero, double amp = 0.0) {
  ManifoldSpec s;
  s.points = {n, 1};
  s.phi.kind = phi;
  s.phi.amplitude = amp;
  return Manifold::create(s);
}

ScalarField bump(const ManifoldPtr& man, double base = 1.0, double amp = 0.5) {
  return ScalarField::sample(man, [&](double x, double) { return base + amp * std::cos(x); });
}

SolverConfig config(double p, double dt, double t_end, int stride = 1) {
  SolverConfig c;
  c.p = p;
  c.dt = dt;
  c.t_end = t_end;
  c.snapshot_stride = stride;
  return c;
}

}  // namespace

TEST_CASE("constants are stationary") {
  const auto man = circle(32, WeightKind::sin_first, 0.3);
  for (auto scheme : {TimeScheme::explicit_euler, TimeScheme::rk4}) {
    SolverConfig c = config(2.0, 1e-3, 0.05);
    c.scheme = scheme;
    const Trajectory tr = solve(ScalarField::constant(man, 1.7), c);
    for (std::size_t k = 0; k < tr.size(); ++k)
      for (double v : tr.u(k).values()) REQUIRE(v == 1.7);
  }
}

TEST_CASE("one Euler step on eight nodes matches a hand-built stencil") {
  const auto man = circle(8);
  const ScalarField u0 = bump(man);
  const Trajectory tr = solve(u0, config(2.0, 1e-3, 1e-3));
  REQUIRE(tr.size() == 2);
  const double h = 2 * std::numbers::pi / 8;
  for (int i = 0; i < 8; ++i) {
    // Δ(u²) with the two-cell centered stencil of the divergence-form operator
    auto sq = [&](int j) {
      const double v = u0[static_cast<std::size_t>(((j % 8) + 8) % 8)];
      return v * v;
    };
    const double lap = (sq(i + 2) - 2 * sq(i) + sq(i - 2)) / (4 * h * h);
    CHECK(tr.u(1)[i] == doctest::Approx(u0[i] + 1e-3 * lap).epsilon(1e-14));
  }
}

TEST_CASE("mass is conserved to round-off") {
  const auto man = circle(64, WeightKind::sin_first, 0.3);
  const ScalarField u0 = bump(man);
  for (double p : {2.0, 0.7}) {
    const Trajectory tr = solve(u0, config(p, 2e-5, 0.04, 100));
    const double m0 = weighted_integral(tr.u(0));
    for (std::size_t k = 0; k < tr.size(); ++k)
      CHECK(std::abs(weighted_integral(tr.u(k)) - m0) <= 1e-10 * m0);
  }
}

TEST_CASE("configuration is validated") {
  const auto man = circle(16);
  const ScalarField u0 = bump(man);
  CHECK_THROWS_WITH_AS(solve(u0, config(1.0, 1e-3, 0.1)), doctest::Contains("p≠1 required"),
                       ParameterError);
  CHECK_THROWS_AS(solve(u0, config(-0.5, 1e-3, 0.1)), ParameterError);
  CHECK_THROWS_AS(solve(u0, config(2.0, -1.0, 0.1)), ParameterError);
  CHECK_THROWS_AS(solve(u0, config(2.0, 1e-3, 0.0)), ParameterError);
  CHECK_THROWS_AS(solve(u0, config(2.0, 1e-3, 0.1, 0)), ParameterError);
  SolverConfig c = config(2.0, 1e-3, 0.1);
  c.positivity_floor = 0.6;  // u0 dips to 0.5
  CHECK_THROWS_AS(solve(u0, c), ParameterError);
}

TEST_CASE("positivity breach aborts with the offending time") {
  const auto man = circle(32);
  SolverConfig c = config(2.0, 10.0, 100.0);
  try {
    solve(bump(man), c);
    FAIL("expected a positivity breach");
  } catch (const PositivityError& e) {
    CHECK(e.time() == doctest::Approx(10.0));
    CHECK(e.min_value() <= c.positivity_floor);
  }
}

TEST_CASE("unstable steps are flagged in the metadata") {
  const auto man = circle(64);
  const Trajectory ok = solve(bump(man), config(2.0, 1e-5, 1e-4));
  CHECK(ok.metadata().warnings.empty());
  // a dt just above the heuristic limit; one step stays positive
  const double bound = ok.metadata().stability_bound;
  const Trajectory risky = solve(bump(man), config(2.0, 1.05 * bound, 1.05 * bound));
  CHECK(risky.metadata().warnings.size() == 1);
}

TEST_CASE("automatic step follows the CFL formula") {
  const auto man = circle(64);
  const double h = man->spacing(0);
  SolverConfig c;
  c.p = 2.0;
  c.cfl_fraction = 0.2;
  CHECK(automatic_time_step(bump(man), c) == doctest::Approx(0.2 * h * h / (2.0 * 1.5)));
  c.p = 0.5;  // largest p u^{p-1} sits at the minimum of u
  CHECK(automatic_time_step(bump(man), c) ==
        doctest::Approx(0.2 * h * h / (0.5 * std::pow(0.5, -0.5))));
  c.dt.reset();
  c.t_end = 1e-3;
  const Trajectory tr = solve(bump(man), c);
  CHECK(tr.metadata().auto_dt);
  CHECK(tr.metadata().dt == doctest::Approx(automatic_time_step(bump(man), c)));
}

TEST_CASE("snapshots are kept at stride multiples") {
  const auto man = circle(16);
  const Trajectory tr = solve(bump(man), config(2.0, 1e-3, 0.01, 3));
  REQUIRE(tr.size() == 4);  // steps 0, 3, 6, 9 of 10
  CHECK(tr.time(3) == doctest::Approx(9e-3));
  CHECK(tr.nearest(0.0051) == 2);
  CHECK_THROWS(tr.time(4));
}

TEST_CASE("solves are bit-for-bit reproducible") {
  const auto man = circle(32, WeightKind::sin_first, 0.3);
  const Trajectory a = solve(bump(man), config(2.0, 1e-4, 0.01));
  const Trajectory b = solve(bump(man), config(2.0, 1e-4, 0.01));
  std::ostringstream sa, sb;
  a.write_csv(sa);
  b.write_csv(sb);
  CHECK(sa.str() == sb.str());
  CHECK(sa.str().rfind("t,node_index,x,u\n", 0) == 0);
}

TEST_CASE("euler and rk4 agree to first order") {
  const auto man = circle(32);
  SolverConfig c = config(2.0, 1e-4, 0.02);
  const Trajectory e = solve(bump(man), c);
  c.scheme = TimeScheme::rk4;
  const Trajectory r = solve(bump(man), c);
  double diff = 0.0;
  for (std::size_t i = 0; i < man->node_count(); ++i)
    diff = std::max(diff, std::abs(e.u(e.size() - 1)[i] - r.u(r.size() - 1)[i]));
  CHECK(diff < 1e-4);
  CHECK(diff > 0.0);
}

TEST_CASE("pressure variable") {
  const auto man = circle(8);
  CHECK(pressure(ScalarField::constant(man, 3.0), 2.0)[0] == doctest::Approx(6.0));
  CHECK(pressure(ScalarField::constant(man, 4.0), 0.5)[0] == doctest::Approx(-0.5));
  CHECK(pressure(ScalarField::constant(man, 1.0), 3.0)[0] == doctest::Approx(1.5));
  CHECK_THROWS_AS(pressure(ScalarField::constant(man, 1.0), 1.0), ParameterError);
  CHECK_THROWS_AS(pressure(ScalarField::constant(man, -1.0), 2.0), ParameterError);
}

TEST_CASE("pressure residual vanishes on constants and is small on smooth data") {
  const auto man = circle(64);
  const Trajectory flat = solve(ScalarField::constant(man, 2.0), config(2.0, 1e-4, 1e-3));
  CHECK(pressure_residual(flat, 5).max_abs() == 0.0);
  CHECK_THROWS_AS(pressure_residual(flat, 0), ParameterError);

  const Trajectory tr = solve(bump(man), config(2.0, 2e-5, 0.02, 10));
  const std::size_t k = tr.size() / 2;
  const double vmax = pressure(tr.u(k), 2.0).max_abs();
  CHECK(pressure_residual(tr, k).max_abs() < 1e-2 * vmax);
}
