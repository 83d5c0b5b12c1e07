#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pmeflow/scenario.hpp"

namespace pmeflow {

/// Result of re-running a raw violation on the refined grid (h/2, dt/4).
struct RefinementResult {
  bool attempted = false;
  bool available = true;  // false for file-based inputs that cannot be resampled
  double raw_margin = 0.0;
  double refined_margin = 0.0;
  bool confirmed = false;  // violation survived without shrinking by 2x
};

struct CheckResult {
  std::string id;
  std::string kind;  // check kind or identity suite name
  std::string label;
  bool pass = false;
  double min_margin = 0.0;  // >= -tol passes (raw, before refinement)
  double argmin_time = 0.0;
  std::optional<std::size_t> argmin_node;
  double tol = 0.0;
  std::optional<double> m;
  std::optional<double> K;
  std::optional<double> lambda_min;
  std::optional<double> observed_order;
  RefinementResult refinement;
  std::string note;
};

struct RunReport {
  std::string name;
  std::string scenario_json;  // echo of the parsed scenario
  std::vector<CheckResult> checks;
  std::optional<double> K;           // largest K over the checks
  std::optional<double> lambda_min;  // smallest lambda_min over the checks
  std::vector<std::string> warnings;
  double wall_time = 0.0;
  bool pass = false;

  int exit_code() const noexcept { return pass ? 0 : 1; }
  /// {scenario, checks:[{id, pass, min_margin, argmin, ...}], K, lambda_min, ...}
  std::string to_json() const;
};

struct RunOptions {
  std::filesystem::path out_dir;  // no files are written when empty
  std::optional<std::uint64_t> seed;  // overrides the scenario seed
  bool confirm_violations = true;
};

/// Validates every check, solves, evaluates and writes trajectory.csv,
/// <check id>.csv and summary.json. Throws ScenarioError / ParameterError
/// for invalid input (before any time stepping) and NumericalError when the
/// solve breaks down.
RunReport run(const Scenario& scenario, const RunOptions& options);
RunReport run_file(const std::filesystem::path& path, const RunOptions& options);

inline constexpr std::uint64_t kDefaultIdentitySeed = 20240607;

/// Operator identity suites on seeded random trigonometric fields.
RunReport identities(std::uint64_t seed, const RunOptions& options);

enum class SweepAxis { p, m, alpha };

struct SweepPoint {
  double value = 0.0;
  std::optional<RunReport> report;
  std::string skipped;  // reason when the point was not run
};

/// One run per value; invalid points are skipped with the reason. Writes
/// sweep.csv and point_<i>/ subdirectories when out_dir is set.
std::vector<SweepPoint> sweep(const Scenario& base, SweepAxis axis,
                              const std::vector<double>& values, const RunOptions& options);

}  // namespace pmeflow
