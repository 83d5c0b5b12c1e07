// Command-line front end over the C interface.
#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "pmeflow/pmeflow.h"

namespace {

int exit_code_for(pmf_status status) {
  switch (status) {
    case PMF_OK: return 0;
    case PMF_ERR_NUMERICAL:
    case PMF_ERR_POSITIVITY: return 1;
    default: return 2;
  }
}

int report_error(pmf_status status) {
  std::fprintf(stderr, "error (%s): %s\n", pmf_status_name(status), pmf_last_error());
  return exit_code_for(status);
}

void print_checks(const pmf_report* report) {
  const std::size_t n = pmf_report_check_count(report);
  for (std::size_t i = 0; i < n; ++i) {
    pmf_check_info c{};
    if (pmf_report_check(report, i, &c) != PMF_OK) continue;
    std::printf("%s  %-24s %-16s min_margin=% .6e tol=%.3e t=%.6g\n", c.pass ? "PASS" : "FAIL",
                c.id, c.kind, c.min_margin, c.tol, c.argmin_time);
  }
}

const char* c_str_or_null(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted porous medium / fast diffusion verification harness"};
  app.require_subcommand(1);
  app.set_version_flag("--version", pmf_version());

  std::string out_dir;
  std::optional<std::uint64_t> seed;
  app.add_option("--out", out_dir, "Output directory for CSV traces and summary.json");
  app.add_option("--seed", seed, "Seed override for randomized fields");

  std::string scenario_path;
  auto* run = app.add_subcommand("run", "Run a scenario file");
  run->add_option("file", scenario_path, "Scenario file")->required();
  run->fallthrough();

  auto* ids = app.add_subcommand("identities", "Run the operator identity suites");
  ids->fallthrough();

  std::string axis;
  std::vector<double> values;
  auto* sw = app.add_subcommand("sweep", "Run a scenario once per parameter value");
  sw->add_option("file", scenario_path, "Base scenario file")->required();
  sw->add_option("--axis", axis, "p, m or alpha")
      ->required()
      ->check(CLI::IsMember({"p", "m", "alpha"}));
  sw->add_option("--values", values, "Comma separated values")->required()->delimiter(',');
  sw->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::uint64_t* seed_ptr = seed ? &*seed : nullptr;

  if (run->parsed()) {
    pmf_report* report = nullptr;
    const pmf_status st =
        pmf_run_scenario(scenario_path.c_str(), c_str_or_null(out_dir), seed_ptr, &report);
    if (st != PMF_OK) return report_error(st);
    print_checks(report);
    const int code = pmf_report_pass(report) ? 0 : 1;
    std::printf("%s\n", code == 0 ? "all checks passed" : "some checks failed");
    pmf_report_destroy(report);
    return code;
  }

  if (ids->parsed()) {
    pmf_report* report = nullptr;
    const pmf_status st = pmf_identities(seed ? *seed : pmf_default_identity_seed(),
                                         c_str_or_null(out_dir), &report);
    if (st != PMF_OK) return report_error(st);
    print_checks(report);
    const int code = pmf_report_pass(report) ? 0 : 1;
    pmf_report_destroy(report);
    return code;
  }

  pmf_sweep* result = nullptr;
  const pmf_status st = pmf_sweep_run(scenario_path.c_str(), axis.c_str(), values.data(),
                                      values.size(), c_str_or_null(out_dir), seed_ptr, &result);
  if (st != PMF_OK) return report_error(st);
  int code = 0;
  for (std::size_t i = 0; i < pmf_sweep_size(result); ++i) {
    double value = 0.0;
    int ran = 0;
    const pmf_report* report = nullptr;
    pmf_sweep_point(result, i, &value, &ran, &report);
    if (!ran) {
      std::printf("%s=%g  SKIPPED: %s\n", axis.c_str(), value, pmf_sweep_skip_reason(result, i));
      continue;
    }
    std::printf("%s=%g  %s\n", axis.c_str(), value, pmf_report_pass(report) ? "pass" : "FAIL");
    print_checks(report);
    if (!pmf_report_pass(report)) code = 1;
  }
  pmf_sweep_destroy(result);
  return code;
}
