#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <ostream>
#include <string_view>
#include <vector>

#include "pmeflow/solver.hpp"

namespace pmeflow {

/// Global (complete / compact manifold) gradient estimates for the pressure
/// v = p/(p-1) u^{p-1}. 1.2 and 1.4 are the fast-diffusion statements.
enum class Theorem { t1_1, t1_2, t1_3, t1_4, t1_5, t1_6, t1_7 };

std::string_view to_string(Theorem id) noexcept;
std::optional<Theorem> parse_theorem(std::string_view text) noexcept;
bool is_fast_diffusion(Theorem id) noexcept;
/// True for the estimates that carry their own α(t) and φ(t).
bool has_time_profile(Theorem id) noexcept;

/// ã = m(p-1) / (m(p-1) + 2). Throws ParameterError when p = 1 - 2/m.
double a_tilde(double p, double m);

/// M = (p-1) max v for p > 1, (1-p) max(-v) for p < 1, over snapshots with
/// t <= window_end. Throws ParameterError on an empty window.
double big_M(const Trajectory& trajectory, double window_end);

/// |∇v|²/v - α v_t/v for p > 1, and the negated form -|∇v|²/v + α v_t/v
/// for p < 1. v_t is the centered difference of neighbouring snapshots.
ScalarField liyau_lhs(const Trajectory& trajectory, std::size_t k, double alpha);

struct EstimateParams {
  double p = 2.0;
  double m = 2.0;
  double alpha = 1.0;  // ignored by 1.2 (α -> 1 limit) and 1.5-1.7 (α(t))
  double K = 0.0;
  std::optional<double> M;  // computed from the trajectory when empty
  double t_check_min = 0.01;
  std::optional<double> tol;
};

/// The estimate at time t reads  LHS(alpha) <= rhs.
struct TheoremBound {
  double alpha;
  double rhs;
};

/// Requires params.M. For 1.6 and 1.7, rhs is φ(t) and alpha is α(t).
TheoremBound theorem_rhs(Theorem id, const EstimateParams& params, double t);

/// Throws ParameterError if (p, m, α, K) is outside the theorem's regime.
void validate_regime(Theorem id, const EstimateParams& params);

/// 1e-3 |ã| α² / t_check_min (α = 1 for the estimates without a fixed α).
double default_tolerance(Theorem id, const EstimateParams& params);

struct EstimateReport {
  Theorem theorem = Theorem::t1_1;
  std::vector<double> times;
  std::vector<double> min_margin;  // min over nodes of rhs - lhs, per snapshot
  std::vector<std::size_t> argmin_node;
  double global_min_margin = 0.0;
  double argmin_time = 0.0;
  std::size_t argmin_node_global = 0;
  double M = 0.0;
  double tol = 0.0;
  bool pass = false;  // global_min_margin >= -tol

  /// Columns: theorem,t,min_margin,argmin_node,pass
  void write_csv(std::ostream& out) const;
};

/// Evaluates the margin on every interior snapshot with t >= t_check_min.
EstimateReport check_estimate(const Trajectory& trajectory, Theorem id, EstimateParams params);

/// A scalar function of time with its derivative.
struct TimeProfile {
  std::function<double(double)> value;
  std::function<double(double)> rate;

  static TimeProfile constant(double c);
};

/// Signed slack of the differential inequality for
/// F = |∇v|²/v - α v_t/v - φ(t) under L = ∂_t - (p-1) v Δ_φ:
/// RHS - L(F) for p > 1 and L(F) - RHS for p < 1, so the expected sign is
/// nonnegative in both regimes. Needs 2 <= k <= size-3.
ScalarField lemma21_residual(const Trajectory& trajectory, std::size_t k, double m,
                             const TimeProfile& alpha, const TimeProfile& varphi);

/// A(ε₁, ε₂) = [1 - ã(1-α)] - (1+ε₂)²(1-ã)²(1-α) / ((1-ε₁)(1-α-ã)).
double feasibility_A(double p, double m, double alpha, double eps1, double eps2);

}  // namespace pmeflow
