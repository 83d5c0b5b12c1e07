#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pmeflow/field.hpp"

namespace pmeflow {

enum class TimeScheme { explicit_euler, rk4 };

/// Time-stepping parameters for u_t = Δ_φ(u^p).
struct SolverConfig {
  double p = 2.0;  // p > 1 porous medium, 0 < p < 1 fast diffusion
  TimeScheme scheme = TimeScheme::explicit_euler;
  std::optional<double> dt;   // fixed step; automatic when empty
  double cfl_fraction = 0.2;  // used for the automatic step
  double t_end = 0.1;
  double positivity_floor = 1e-8;
  int snapshot_stride = 1;  // keep every k-th step

  /// Throws ParameterError.
  void validate() const;
};

struct SolverMetadata {
  double dt = 0.0;
  bool auto_dt = false;
  long long steps = 0;
  double stability_bound = 0.0;  // heuristic explicit limit for the chosen scheme
  std::vector<std::string> warnings;
};

/// Snapshots u(., t_k) of one solve, times strictly increasing from 0.
class Trajectory {
 public:
  Trajectory(ManifoldPtr manifold, SolverConfig config, SolverMetadata metadata,
             std::vector<double> times, std::vector<ScalarField> snapshots);

  const Manifold& manifold() const noexcept { return *manifold_; }
  const ManifoldPtr& manifold_ptr() const noexcept { return manifold_; }
  const SolverConfig& config() const noexcept { return config_; }
  const SolverMetadata& metadata() const noexcept { return metadata_; }
  double p() const noexcept { return config_.p; }

  std::size_t size() const noexcept { return times_.size(); }
  double time(std::size_t k) const { return times_.at(k); }
  const std::vector<double>& times() const noexcept { return times_; }
  const ScalarField& u(std::size_t k) const { return snapshots_.at(k); }

  /// Index of the snapshot nearest to t.
  std::size_t nearest(double t) const noexcept;

  /// CSV columns: t,node_index,x[,y],u
  void write_csv(std::ostream& out) const;

 private:
  ManifoldPtr manifold_;
  SolverConfig config_;
  SolverMetadata metadata_;
  std::vector<double> times_;
  std::vector<ScalarField> snapshots_;
};

/// dt = cfl * h² / (max_i p u_i^{p-1} * (1 + |∇φ|_inf h)).
double automatic_time_step(const ScalarField& u0, const SolverConfig& config);

/// Integrates from u0 to config.t_end. Throws ParameterError for invalid
/// input, PositivityError when min u drops to the floor, NumericalError on
/// non-finite values.
Trajectory solve(const ScalarField& u0, const SolverConfig& config);

/// v = p/(p-1) u^{p-1}. Throws ParameterError for p = 1 or u <= 0.
ScalarField pressure(const ScalarField& u, double p);

/// Centered difference (v_{k+1} - v_{k-1}) / (t_{k+1} - t_{k-1}) of the
/// pressure, 1 <= k <= size-2.
ScalarField pressure_rate(const Trajectory& trajectory, std::size_t k);

/// Centered-in-time residual of v_t = (p-1) v Δ_φ v + |∇v|² at snapshot k,
/// 1 <= k <= size-2.
ScalarField pressure_residual(const Trajectory& trajectory, std::size_t k);

/// Throws ParameterError unless p > 0 and p != 1.
void require_exponent(double p);

}  // namespace pmeflow
