#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pmeflow/error.hpp"
#include "pmeflow/scenario.hpp"

using namespace pmeflow;

namespace {

const std::string kMinimal = R"(schema = 1
[solver]
p = 2
t_end = 0.01
)";

std::string with(const std::string& extra) { return kMinimal + extra; }

}  // namespace

TEST_CASE("minimal scenario takes defaults") {
  const Scenario s = parse_scenario(kMinimal);
  CHECK(s.schema == 1);
  CHECK(s.name == "scenario");
  CHECK_FALSE(s.seed.has_value());
  CHECK(s.manifold.kind == ManifoldKind::circle);
  CHECK(s.initial.kind == InitialKind::constant);
  CHECK(s.solver.p == 2.0);
  CHECK_FALSE(s.solver.dt.has_value());
  CHECK(s.checks.empty());
}

TEST_CASE("full scenario") {
  const Scenario s = parse_scenario(R"(
# comment line
schema = 1
name = "full#name"   # trailing comment
seed = 42

[manifold]
kind = "torus2"
length = 6.0
length_y = 3.0
points = 16
points_y = 8
phi = "sin"
phi_amplitude = 0.3

[initial]
kind = "random_trig"
base = 2.0
amplitude = 0.5
max_mode = 2

[solver]
p = 1.5
scheme = "rk4"
dt = 1e-4
t_end = 0.02
stride = 5
floor = 1e-10

[[check]]
kind = "theorem"
theorem = "1.3"
m = 4
alpha = 1.5

[[check]]
kind = "theorem"
theorem = "T1.3"
m = 5
alpha = 2

[[check]]
kind = "entropy"
m = 3
tol = 1e-6

[[check]]
kind = "mass"
id = "my-mass.check"
)");
  CHECK(s.name == "full#name");
  CHECK(s.seed == 42u);
  CHECK(s.manifold.kind == ManifoldKind::torus2);
  CHECK(s.manifold.lengths[1] == 3.0);
  CHECK(s.manifold.points[0] == 16);
  CHECK(s.manifold.points[1] == 8);
  CHECK(s.manifold.phi.kind == WeightKind::sin_first);
  CHECK(s.initial.kind == InitialKind::random_trig);
  CHECK(s.initial.max_mode == 2);
  CHECK(s.solver.scheme == TimeScheme::rk4);
  CHECK(s.solver.snapshot_stride == 5);
  REQUIRE(s.checks.size() == 4);
  CHECK(s.checks[0].id == "T1.3");
  CHECK(s.checks[1].id == "T1.3_2");
  CHECK(s.checks[2].id == "entropy");
  CHECK(s.checks[2].tol == 1e-6);
  CHECK(s.checks[3].id == "my-mass.check");
  CHECK(s.checks[3].kind == CheckKind::mass);

  const ManifoldPtr man = build_manifold(s);
  CHECK(man->node_count() == 128);
  const ScalarField u0 = build_initial(s, man);
  CHECK(u0.min() >= 1.5 - 1e-12);
  CHECK(u0.max() <= 2.5 + 1e-12);
  const ScalarField again = build_initial(s, man);
  CHECK(std::equal(again.values().begin(), again.values().end(), u0.values().begin()));
}

TEST_CASE("cosine initial data") {
  const Scenario s = parse_scenario(with(R"(
[manifold]
points = 8
[initial]
kind = "cosine"
base = 1
amplitude = 0.5
mode = 2
)"));
  const ScalarField u0 = build_initial(s, build_manifold(s));
  CHECK(u0[0] == doctest::Approx(1.5));
  CHECK(u0[1] == doctest::Approx(1.0 + 0.5 * std::cos(std::numbers::pi / 2)));
  CHECK(u0[2] == doctest::Approx(0.5));
}

TEST_CASE("errors carry line numbers") {
  CHECK_THROWS_WITH_AS(parse_scenario(with("bogus = 3\n")),
                       doctest::Contains("unknown key 'bogus'"), ScenarioError);
  CHECK_THROWS_WITH_AS(parse_scenario(with("[solver]\n")), doctest::Contains("duplicate section"),
                       ScenarioError);
  CHECK_THROWS_WITH_AS(parse_scenario("schema = 1\nname = 3\n"), doctest::Contains("line 2"),
                       ScenarioError);
  CHECK_THROWS_WITH_AS(parse_scenario("schema = 1\nname = unquoted\n"),
                       doctest::Contains("quoted string"), ScenarioError);
  CHECK_THROWS_WITH_AS(parse_scenario(with("[solver2]\n")), doctest::Contains("unknown section"),
                       ScenarioError);
  CHECK_THROWS_AS(parse_scenario(with("[[check]]\nkind = \"theorem\"\n")), ScenarioError);
  CHECK_THROWS_AS(parse_scenario(with("[[check]]\nkind = \"theorem\"\ntheorem = \"1.8\"\n")),
                  ScenarioError);
  CHECK_THROWS_AS(parse_scenario(with("[[check]]\nkind = \"mass\"\ntheorem = \"1.1\"\n")),
                  ScenarioError);
  CHECK_THROWS_AS(parse_scenario(with("[[check]]\nkind = \"mass\"\nkind = \"mass\"\n")),
                  ScenarioError);
  CHECK_THROWS_AS(parse_scenario(with("[manifold]\npoints = 1.5\n")), ScenarioError);
  CHECK_THROWS_AS(parse_scenario(with("[manifold]\nkind = \"sphere\"\n")), ScenarioError);
  CHECK_THROWS_AS(parse_scenario(with("just text\n")), ScenarioError);
}

TEST_CASE("schema version") {
  CHECK_THROWS_WITH_AS(parse_scenario("[solver]\np = 2\n"), doctest::Contains("missing schema"),
                       ScenarioError);
  CHECK_THROWS_WITH_AS(parse_scenario("schema = 2\n"), doctest::Contains("not supported"),
                       ScenarioError);
}

TEST_CASE("seed is required for random initial data") {
  CHECK_THROWS_WITH_AS(parse_scenario(with("[initial]\nkind = \"random_trig\"\namplitude = 0.1\n")),
                       doctest::Contains("seed is required"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario("schema = 1\nseed = -4\n"), ScenarioError);
}

TEST_CASE("check ids") {
  CHECK_THROWS_WITH_AS(
      parse_scenario(with("[[check]]\nkind = \"mass\"\nid = \"a\"\n[[check]]\nkind = \"mass\"\nid = \"a\"\n")),
      doctest::Contains("duplicate check id"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario(with("[[check]]\nkind = \"mass\"\nid = \"a/b\"\n")), ScenarioError);
  const Scenario s =
      parse_scenario(with("[[check]]\nkind = \"mass\"\n[[check]]\nkind = \"mass\"\nid = \"mass_2\"\n"
                          "[[check]]\nkind = \"mass\"\n"));
  CHECK(s.checks[0].id == "mass");
  CHECK(s.checks[1].id == "mass_2");
  CHECK(s.checks[2].id == "mass_3");
}

TEST_CASE("file references resolve against the scenario directory") {
  const auto dir = std::filesystem::temp_directory_path() / "pmeflow_scenario_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "u0.txt") << "1.0 1.1\n1.2\n1.3 1 1 1 1\n";
    std::ofstream(dir / "phi.txt") << "0 0.1 0 -0.1 0 0 0 0\n";
    std::ofstream(dir / "s.toml") << with(R"(
[manifold]
points = 8
phi = "file"
phi_file = "phi.txt"
[initial]
kind = "file"
file = "u0.txt"
)");
  }
  const Scenario s = load_scenario(dir / "s.toml");
  const ManifoldPtr man = build_manifold(s);
  CHECK(man->phi()[1] == 0.1);
  CHECK(build_initial(s, man)[3] == 1.3);
  CHECK(read_values(dir / "u0.txt").size() == 8);
  CHECK_THROWS_AS(load_scenario(dir / "missing.toml"), IoError);
  {
    std::ofstream(dir / "short.txt") << "1 2\n";
  }
  Scenario bad = s;
  bad.initial.file = "short.txt";
  CHECK_THROWS(build_initial(bad, man));
  std::filesystem::remove_all(dir);
}

TEST_CASE("shipped scenarios parse") {
  for (const auto& entry : std::filesystem::directory_iterator(PMF_SCENARIO_DIR)) {
    if (entry.path().extension() != ".toml") continue;
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(load_scenario(entry.path()));
  }
}
