#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <vector>

#include "pmeflow/solver.hpp"

namespace pmeflow {

// Entropies of the flow, with v the pressure, ã = m(p-1)/(m(p-1)+2) and
// c = m(p-1) + 2:
//   N(t) = -t^ã ∫ uv dμ
//   W(t) = d/dt[t N] = t^{ã+1} ∫ (p|∇v|²/v - (ã+1)/t) uv dμ
// All functions take a snapshot index k with t_k > 0 and validate m
// (m > n, or m = n with constant phi).

double entropy_N(const Trajectory& trajectory, std::size_t k, double m);
double entropy_W(const Trajectory& trajectory, std::size_t k, double m);

/// -t^ã ∫ ((p-1)Δ_φv + ã/t) uv dμ
double dN_formula(const Trajectory& trajectory, std::size_t k, double m);

/// -2(p-1) t^{ã+1} ∫ { |∇²v + g/(ct)|² + |∇φ·∇v - (m-n)/(ct)|²/(m-n)
///                      + Ric_φ^m(∇v,∇v) } uv dμ
/// - 2 t^{ã+1} ∫ |(p-1)Δ_φv + ã/t|² uv dμ
/// The (m-n) term is dropped when m = n.
double dW_formula(const Trajectory& trajectory, std::size_t k, double m);

/// Throws ParameterError unless 0 < p < 1, eps > 0, eps >= m-n and
/// 1 - 1/(n+eps) <= p <= 1 - (m-n)/(m eps).
void require_fast_window(double p, double m, int n, double eps);

/// Upper bound on dW/dt for 0 < p < 1:
/// 2 t^{ã+1} ∫ { (1-p) Ric_φ^m(∇v,∇v)
///              + ((1-n(1-p))/(n(1-p)) - eps/n) |(p-1)Δ_φv + ã/t|²
///              + (m(1-p)/(n(m-n)) - 1/(n eps)) |∇φ·∇v - (m-n)/(ct)|² } uv dμ
double dW_upper_bound_fast(const Trajectory& trajectory, std::size_t k, double m, double eps);

/// Natural magnitude t^{ã-1} ∫ |uv| dμ of dN/dt and dW/dt.
double entropy_scale(const Trajectory& trajectory, std::size_t k, double m);

/// d/dt ∫ uv dμ three ways: centered difference, (p-1)∫(Δ_φv) uv dμ and
/// -p ∫ |∇v|² u dμ.
struct Lemma41 {
  double fd;
  double middle;
  double right;

  /// Largest pairwise difference over the largest magnitude (0 when all vanish).
  double relative_mismatch() const noexcept;
};
Lemma41 lemma41_check(const Trajectory& trajectory, std::size_t k);

/// d/dt ∫ (Δ_φv) uv dμ by centered difference and by
/// 2 ∫ [(p-1)(Δ_φv)² + |∇²v|² + Ric_φ(∇v,∇v)] uv dμ.
struct Lemma42 {
  double fd;
  double formula;

  double relative_mismatch() const noexcept;
};
Lemma42 lemma42_check(const Trajectory& trajectory, std::size_t k);

struct EntropyTrace {
  double m = 0.0;
  std::optional<double> eps;
  std::vector<double> times;
  std::vector<double> N, W, dN_formula, dN_fd, dW_formula, dW_fd, bound_fast, scale;
  std::vector<bool> monotone;  // dN_formula <= tol*scale and dW_formula <= tol*scale

  /// Columns: t,N,W,dN_formula,dN_fd,dW_formula,dW_fd,bound_fast,monotone_flag.
  /// Entries without a value are written as nan.
  void write_csv(std::ostream& out) const;
};

/// Evaluates every snapshot with t >= t_min (and t > 0). Finite-difference
/// entries need both neighbours and are nan otherwise; bound_fast is filled
/// when eps is given (0 < p < 1 only).
EntropyTrace entropy_trace(const Trajectory& trajectory, double m, std::optional<double> eps,
                           double t_min, double tol);

}  // namespace pmeflow
