#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pmeflow/estimates.hpp"
#include "pmeflow/manifold.hpp"
#include "pmeflow/solver.hpp"

namespace pmeflow {

inline constexpr int kScenarioSchema = 1;

enum class InitialKind { constant, cosine, random_trig, file };

/// u0 = base + amplitude * cos(2 pi mode x / Lx) for `cosine`; for
/// `random_trig` a seeded series with |u0 - base| <= amplitude.
struct InitialSpec {
  InitialKind kind = InitialKind::constant;
  double base = 1.0;
  double amplitude = 0.0;
  int mode = 1;
  int max_mode = 3;
  std::string file;  // one value per line, node order
};

enum class CheckKind { theorem, entropy, lemma21, lemma41, lemma42, pressure, mass };

std::string_view to_string(CheckKind kind) noexcept;

/// One [[check]] block. Unset values fall back to per-kind defaults.
struct CheckSpec {
  CheckKind kind = CheckKind::theorem;
  std::string id;
  std::optional<Theorem> theorem;
  std::optional<double> p;  // runs on a separate trajectory when it differs from the solver p
  std::optional<double> alpha;
  std::optional<double> m;
  std::optional<double> eps;
  std::optional<double> eps1;
  std::optional<double> eps2;
  std::optional<double> t_check_min;
  std::optional<double> tol;
};

struct Scenario {
  int schema = kScenarioSchema;
  std::string name;
  std::optional<std::uint64_t> seed;
  std::string output;  // optional output directory, relative to the file
  ManifoldSpec manifold;
  std::string phi_file;
  InitialSpec initial;
  SolverConfig solver;
  std::vector<CheckSpec> checks;
  std::filesystem::path base_dir;  // directory for relative file references
};

/// Parses the TOML-style scenario text. Throws ScenarioError with a line
/// number for syntax errors, unknown keys and bad values.
Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);

/// Manifold with phi loaded from phi_file when requested.
ManifoldPtr build_manifold(const Scenario& scenario);
ScalarField build_initial(const Scenario& scenario, const ManifoldPtr& manifold);

/// Reads whitespace separated numbers.
std::vector<double> read_values(const std::filesystem::path& path);

}  // namespace pmeflow
