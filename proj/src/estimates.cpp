#include "pmeflow/estimates.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "pmeflow/csv.hpp"
#include "pmeflow/curvature.hpp"
#include "pmeflow/error.hpp"
#include "pmeflow/operators.hpp"

namespace pmeflow {

namespace {

constexpr std::array<std::string_view, 7> kNames{"1.1", "1.2", "1.3", "1.4", "1.5", "1.6", "1.7"};

// sinh(y) - y without cancellation for small y.
double sinh_minus_identity(double y) {
  if (std::abs(y) < 0.5) {
    const double y2 = y * y;
    // y³/3! + y⁵/5! + ... + y¹³/13!
    double term = y * y2 / 6.0;
    double sum = term;
    for (int k = 5; k <= 13; k += 2) {
      term *= y2 / ((k - 1.0) * k);
      sum += term;
    }
    return sum;
  }
  return std::sinh(y) - y;
}

// 1 + (cosh x sinh x - x) / sinh² x, written as 1 + (sinh 2x - 2x) / (2 sinh² x).
double hyperbolic_alpha(double x) {
  if (x > 300.0) return 1.0 + 1.0 / std::tanh(x);  // x / sinh² x underflows
  const double s = std::sinh(x);
  return 1.0 + sinh_minus_identity(2.0 * x) / (2.0 * s * s);
}

}  // namespace

std::string_view to_string(Theorem id) noexcept { return kNames[static_cast<int>(id)]; }

std::optional<Theorem> parse_theorem(std::string_view text) noexcept {
  if (text.starts_with("T") || text.starts_with("t")) text.remove_prefix(1);
  for (std::size_t i = 0; i < kNames.size(); ++i)
    if (kNames[i] == text) return static_cast<Theorem>(i);
  return std::nullopt;
}

bool is_fast_diffusion(Theorem id) noexcept { return id == Theorem::t1_2 || id == Theorem::t1_4; }

bool has_time_profile(Theorem id) noexcept {
  return id == Theorem::t1_5 || id == Theorem::t1_6 || id == Theorem::t1_7;
}

double a_tilde(double p, double m) {
  const double c = m * (p - 1.0) + 2.0;
  if (c == 0.0 || std::abs(c) < 1e-14 * (1.0 + std::abs(m * (p - 1.0))))
    throw ParameterError("ã is singular at p = 1 - 2/m");
  return m * (p - 1.0) / c;
}

double big_M(const Trajectory& traj, double window_end) {
  const double p = traj.p();
  require_exponent(p);
  double best = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t k = 0; k < traj.size() && traj.time(k) <= window_end; ++k) {
    any = true;
    // (p-1) v = p u^{p-1} in both regimes, and (1-p)(-v) is the same quantity.
    for (double u : traj.u(k).values()) best = std::max(best, p * std::pow(u, p - 1.0));
  }
  if (!any) throw ParameterError("big_M: empty time window");
  return best;
}

ScalarField liyau_lhs(const Trajectory& traj, std::size_t k, double alpha) {
  const ScalarField vt = pressure_rate(traj, k);
  const ScalarField v = pressure(traj.u(k), traj.p());
  const VectorField g = gradient(v);
  const double sign = traj.p() > 1.0 ? 1.0 : -1.0;
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = sign * (g.norm_squared(i) / v[i] - alpha * vt[i] / v[i]);
  return ScalarField(traj.manifold_ptr(), std::move(out));
}

TheoremBound theorem_rhs(Theorem id, const EstimateParams& params, double t) {
  if (!params.M) throw ParameterError("theorem_rhs needs M");
  if (!(t > 0.0)) throw ParameterError("theorem_rhs needs t > 0");
  const double at = a_tilde(params.p, params.m);
  const double MK = *params.M * params.K;
  const double a = params.alpha;
  switch (id) {
    case Theorem::t1_1:
      return {a, a * a / (a - 1.0) * at * MK + at * a * a / t};
    case Theorem::t1_2:
      if (params.K > 0.0)
        throw ParameterError("theorem 1.2 global form needs Ric_φ^m >= 0 (K = 0)");
      return {1.0, -at / t};
    case Theorem::t1_3:
      return {a, a * a / (2.0 * (a - 1.0)) * at * MK + at * a * a / t};
    case Theorem::t1_4:
      return {a, (a * a / (2.0 * (1.0 - a)) + 2.0 * (1.0 - at)) * MK + (1.0 - a - at) / t};
    case Theorem::t1_5: {
      const double at_t = std::exp(2.0 * MK * t);
      return {at_t, at * at_t * at_t / t};
    }
    case Theorem::t1_6: {
      if (MK == 0.0) return {1.0, at / t};
      const double x = MK * t;
      return {hyperbolic_alpha(x), at * MK * (1.0 / std::tanh(x) + 1.0)};
    }
    case Theorem::t1_7:
      return {1.0 + 2.0 / 3.0 * MK * t, at / t + at * MK + at / 3.0 * MK * MK * t};
  }
  throw ParameterError("unknown theorem");
}

void validate_regime(Theorem id, const EstimateParams& params) {
  const double p = params.p, m = params.m;
  require_exponent(p);
  const std::string name = "theorem " + std::string(to_string(id));
  if (!(m > 0.0) || !std::isfinite(m)) throw ParameterError(name + ": m must be positive");
  if (!(params.K >= 0.0)) throw ParameterError(name + ": K must be nonnegative");
  if (params.M && !(*params.M > 0.0)) throw ParameterError(name + ": M must be positive");
  if (!(params.t_check_min > 0.0)) throw ParameterError(name + ": t_check_min must be positive");
  if (is_fast_diffusion(id)) {
    if (!(p > 1.0 - 2.0 / m && p < 1.0))
      throw ParameterError(name + " requires p in (1-2/m, 1)");
    if (id == Theorem::t1_4 && !(params.alpha > 0.0 && params.alpha < 1.0))
      throw ParameterError(name + " requires 0 < alpha < 1");
    if (id == Theorem::t1_2 && params.K > 0.0)
      throw ParameterError(name + " global form needs Ric_φ^m >= 0 (K = 0); use 1.4 for K > 0");
  } else {
    if (!(p > 1.0)) throw ParameterError(name + " requires p > 1");
    if ((id == Theorem::t1_1 || id == Theorem::t1_3) && !(params.alpha > 1.0))
      throw ParameterError(name + " requires alpha > 1");
  }
  a_tilde(p, m);
}

double default_tolerance(Theorem id, const EstimateParams& params) {
  const bool fixed_alpha = id == Theorem::t1_1 || id == Theorem::t1_3 || id == Theorem::t1_4;
  const double a = fixed_alpha ? params.alpha : 1.0;
  return 1e-3 * std::abs(a_tilde(params.p, params.m)) * a * a / params.t_check_min;
}

void EstimateReport::write_csv(std::ostream& out) const {
  csv::Writer w(out);
  w.header({"theorem", "t", "min_margin", "argmin_node", "pass"});
  for (std::size_t j = 0; j < times.size(); ++j)
    w.cell(to_string(theorem))
        .cell(times[j])
        .cell(min_margin[j])
        .cell(static_cast<long long>(argmin_node[j]))
        .cell(static_cast<long long>(min_margin[j] >= -tol))
        .end_row();
}

EstimateReport check_estimate(const Trajectory& traj, Theorem id, EstimateParams params) {
  if (params.p != traj.p()) throw ParameterError("estimate parameters disagree with trajectory p");
  validate_regime(id, params);
  require_dimension_parameter(traj.manifold(), params.m);
  if (!params.M) params.M = big_M(traj, traj.times().back());

  EstimateReport rep;
  rep.theorem = id;
  rep.M = *params.M;
  rep.tol = params.tol ? *params.tol : default_tolerance(id, params);
  rep.global_min_margin = std::numeric_limits<double>::infinity();

  for (std::size_t k = 1; k + 1 < traj.size(); ++k) {
    const double t = traj.time(k);
    if (t < params.t_check_min) continue;
    const TheoremBound bound = theorem_rhs(id, params, t);
    const ScalarField lhs = liyau_lhs(traj, k, bound.alpha);
    double worst = std::numeric_limits<double>::infinity();
    std::size_t where = 0;
    for (std::size_t i = 0; i < lhs.size(); ++i) {
      const double margin = bound.rhs - lhs[i];
      if (margin < worst) {
        worst = margin;
        where = i;
      }
    }
    rep.times.push_back(t);
    rep.min_margin.push_back(worst);
    rep.argmin_node.push_back(where);
    if (worst < rep.global_min_margin) {
      rep.global_min_margin = worst;
      rep.argmin_time = t;
      rep.argmin_node_global = where;
    }
  }
  if (rep.times.empty())
    throw ParameterError("no interior snapshot at t >= t_check_min for theorem " +
                         std::string(to_string(id)));
  rep.pass = rep.global_min_margin >= -rep.tol;
  return rep;
}

TimeProfile TimeProfile::constant(double c) {
  return {[c](double) { return c; }, [](double) { return 0.0; }};
}

ScalarField lemma21_residual(const Trajectory& traj, std::size_t k, double m,
                             const TimeProfile& alpha, const TimeProfile& varphi) {
  if (k < 2 || k + 2 >= traj.size())
    throw ParameterError("lemma21_residual needs 2 <= k <= size-3");
  const double p = traj.p();
  const double at = a_tilde(p, m);
  const ManifoldPtr& man = traj.manifold_ptr();

  auto F_at = [&](std::size_t j) {
    const double t = traj.time(j);
    const ScalarField v = pressure(traj.u(j), p);
    const ScalarField vt = pressure_rate(traj, j);
    const VectorField g = gradient(v);
    std::vector<double> f(v.size());
    for (std::size_t i = 0; i < f.size(); ++i)
      f[i] = g.norm_squared(i) / v[i] - alpha.value(t) * vt[i] / v[i] - varphi.value(t);
    return ScalarField(man, std::move(f));
  };

  const ScalarField f_prev = F_at(k - 1);
  const ScalarField f_here = F_at(k);
  const ScalarField f_next = F_at(k + 1);
  const double t = traj.time(k);
  const double span = traj.time(k + 1) - traj.time(k - 1);

  const ScalarField v = pressure(traj.u(k), p);
  const ScalarField vt = pressure_rate(traj, k);
  const VectorField grad_v = gradient(v);
  const ScalarField lap_v = witten_laplacian(v);
  const ScalarField lap_f = witten_laplacian(f_here);
  const VectorField grad_f = gradient(f_here);
  const CurvatureReport curv = bakry_emery(man, m);

  const double a = alpha.value(t), da = alpha.rate(t), dphi = varphi.rate(t);
  const double sign = p > 1.0 ? 1.0 : -1.0;
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double LF = (f_next[i] - f_prev[i]) / span - (p - 1.0) * v[i] * lap_f[i];
    const double q = (p - 1.0) * lap_v[i];
    const double ratio = vt[i] / v[i];
    const double rhs = -q * q / at - 2.0 * (p - 1.0) * curv.tensor.quadratic_form(i, grad_v) +
                       2.0 * p * grad_v.dot(i, grad_f) + (1.0 - a) * ratio * ratio -
                       da * ratio - dphi;
    out[i] = sign * (rhs - LF);
  }
  return ScalarField(man, std::move(out));
}

double feasibility_A(double p, double m, double alpha, double eps1, double eps2) {
  const double at = a_tilde(p, m);
  if (eps1 == 1.0) throw ParameterError("feasibility_A: singular at eps1 = 1");
  if (alpha + at == 1.0) throw ParameterError("feasibility_A: singular at alpha + ã = 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("feasibility_A requires 0 < alpha < 1");
  if (!(eps1 > 0.0 && eps1 < 1.0 && eps2 > 0.0 && eps2 < 1.0))
    throw ParameterError("feasibility_A requires eps1, eps2 in (0, 1)");
  if (!(p > 1.0 - 2.0 / m && p < 1.0))
    throw ParameterError("feasibility_A requires p in (1-2/m, 1)");
  const double lead = 1.0 - at * (1.0 - alpha);
  const double q = (1.0 + eps2) * (1.0 - at);
  return lead - q * q * (1.0 - alpha) / ((1.0 - eps1) * (1.0 - alpha - at));
}

}  // namespace pmeflow
