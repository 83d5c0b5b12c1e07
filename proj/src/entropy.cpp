#include "pmeflow/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pmeflow/csv.hpp"
#include "pmeflow/curvature.hpp"
#include "pmeflow/error.hpp"
#include "pmeflow/estimates.hpp"
#include "pmeflow/operators.hpp"

namespace pmeflow {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Per-snapshot fields shared by the entropy formulas.
struct Snapshot {
  double t;
  ScalarField u;
  ScalarField v;
  VectorField grad_v;
  ScalarField lap_v;
  SymTensorField hess_v;
  std::vector<double> uv;
};

Snapshot analyze(const Trajectory& traj, std::size_t k) {
  const ScalarField& u = traj.u(k);
  ScalarField v = pressure(u, traj.p());
  std::vector<double> uv(u.size());
  for (std::size_t i = 0; i < uv.size(); ++i) uv[i] = u[i] * v[i];
  VectorField g = gradient(v);
  ScalarField l = witten_laplacian(v);
  SymTensorField h = hessian(v);
  return Snapshot{traj.time(k), u, std::move(v), std::move(g), std::move(l), std::move(h),
                  std::move(uv)};
}

// Curvature data depending only on the manifold and m.
struct Geometry {
  int n;
  double m;
  bool drop_weight_term;  // m == n
  VectorField grad_phi;
  SymTensorField ric_m;
  SymTensorField ric;
};

Geometry geometry(const ManifoldPtr& man, double m) {
  require_dimension_parameter(*man, m);
  const ScalarField phi(man, {man->phi().begin(), man->phi().end()});
  return Geometry{man->dimension(), m, m == man->dimension(), gradient(phi),
                  bakry_emery(man, m).tensor, weight_hessian(man)};
}

void require_positive_time(double t) {
  if (!(t > 0.0)) throw ParameterError("entropy needs t > 0");
}

double integrate(const Manifold& man, const std::vector<double>& f) {
  return weighted_integral(man, f);
}

double N_of(const Snapshot& s, double at, const Manifold& man) {
  return -std::pow(s.t, at) * integrate(man, s.uv);
}

double W_of(const Snapshot& s, double p, double at, const Manifold& man) {
  std::vector<double> f(s.uv.size());
  for (std::size_t i = 0; i < f.size(); ++i)
    f[i] = (p * s.grad_v.norm_squared(i) / s.v[i] - (at + 1.0) / s.t) * s.uv[i];
  return std::pow(s.t, at + 1.0) * integrate(man, f);
}

double dN_of(const Snapshot& s, double p, double at, const Manifold& man) {
  std::vector<double> f(s.uv.size());
  for (std::size_t i = 0; i < f.size(); ++i)
    f[i] = ((p - 1.0) * s.lap_v[i] + at / s.t) * s.uv[i];
  return -std::pow(s.t, at) * integrate(man, f);
}

double dW_of(const Snapshot& s, double p, double at, const Geometry& geo, const Manifold& man) {
  const double c = geo.m * (p - 1.0) + 2.0;
  const double inv_ct = 1.0 / (c * s.t);
  const double mn = geo.m - geo.n;
  std::vector<double> f(s.uv.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    // |H + g/(ct)|² = |H|² + 2 tr(H)/(ct) + n/(ct)²
    const double shifted_hess = s.hess_v.frobenius_squared(i) + 2.0 * s.hess_v.trace(i) * inv_ct +
                                geo.n * inv_ct * inv_ct;
    double weight_term = 0.0;
    if (!geo.drop_weight_term) {
      const double y = geo.grad_phi.dot(i, s.grad_v) - mn * inv_ct;
      weight_term = y * y / mn;
    }
    const double curv = geo.ric_m.quadratic_form(i, s.grad_v);
    const double x = (p - 1.0) * s.lap_v[i] + at / s.t;
    f[i] = ((p - 1.0) * (shifted_hess + weight_term + curv) + x * x) * s.uv[i];
  }
  return -2.0 * std::pow(s.t, at + 1.0) * integrate(man, f);
}

double bound_of(const Snapshot& s, double p, double at, double eps, const Geometry& geo,
                const Manifold& man) {
  const int n = geo.n;
  const double c = geo.m * (p - 1.0) + 2.0;
  const double mn = geo.m - n;
  const double c1 = (1.0 - n * (1.0 - p)) / (n * (1.0 - p)) - eps / n;
  const double c2 = geo.drop_weight_term ? 0.0 : geo.m * (1.0 - p) / (n * mn) - 1.0 / (n * eps);
  std::vector<double> f(s.uv.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x = (p - 1.0) * s.lap_v[i] + at / s.t;
    double y2 = 0.0;
    if (!geo.drop_weight_term) {
      const double y = geo.grad_phi.dot(i, s.grad_v) - mn / (c * s.t);
      y2 = y * y;
    }
    f[i] = ((1.0 - p) * geo.ric_m.quadratic_form(i, s.grad_v) + c1 * x * x + c2 * y2) * s.uv[i];
  }
  return 2.0 * std::pow(s.t, at + 1.0) * integrate(man, f);
}

double scale_of(const Snapshot& s, double at, const Manifold& man) {
  std::vector<double> f(s.uv.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::abs(s.uv[i]);
  return std::pow(s.t, at - 1.0) * integrate(man, f);
}

double relative_spread(std::initializer_list<double> values) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo, mag = 0.0;
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    mag = std::max(mag, std::abs(v));
  }
  return mag == 0.0 ? 0.0 : (hi - lo) / mag;
}

void require_interior(const Trajectory& traj, std::size_t k) {
  if (k < 1 || k + 1 >= traj.size())
    throw ParameterError("finite-difference check needs 1 <= k <= size-2");
}

}  // namespace

double entropy_N(const Trajectory& traj, std::size_t k, double m) {
  require_dimension_parameter(traj.manifold(), m);
  const double at = a_tilde(traj.p(), m);
  require_positive_time(traj.time(k));
  return N_of(analyze(traj, k), at, traj.manifold());
}

double entropy_W(const Trajectory& traj, std::size_t k, double m) {
  require_dimension_parameter(traj.manifold(), m);
  const double at = a_tilde(traj.p(), m);
  require_positive_time(traj.time(k));
  return W_of(analyze(traj, k), traj.p(), at, traj.manifold());
}

double dN_formula(const Trajectory& traj, std::size_t k, double m) {
  require_dimension_parameter(traj.manifold(), m);
  const double at = a_tilde(traj.p(), m);
  require_positive_time(traj.time(k));
  return dN_of(analyze(traj, k), traj.p(), at, traj.manifold());
}

double dW_formula(const Trajectory& traj, std::size_t k, double m) {
  const Geometry geo = geometry(traj.manifold_ptr(), m);
  const double at = a_tilde(traj.p(), m);
  require_positive_time(traj.time(k));
  return dW_of(analyze(traj, k), traj.p(), at, geo, traj.manifold());
}

void require_fast_window(double p, double m, int n, double eps) {
  if (!(p > 0.0 && p < 1.0)) throw ParameterError("fast-diffusion bound needs 0 < p < 1");
  if (!(eps > 0.0)) throw ParameterError("fast-diffusion bound needs eps > 0");
  const double slack = 1e-12;
  if (eps < (m - n) - slack * (1.0 + std::abs(m - n)))
    throw ParameterError("fast-diffusion bound needs eps >= m - n");
  const double lo = 1.0 - 1.0 / (n + eps);
  const double hi = 1.0 - (m - n) / (m * eps);
  if (p < lo - slack || p > hi + slack)
    throw ParameterError("fast-diffusion bound needs 1 - 1/(n+eps) <= p <= 1 - (m-n)/(m eps); "
                         "window is [" + csv::format(lo) + ", " + csv::format(hi) + "]");
}

double dW_upper_bound_fast(const Trajectory& traj, std::size_t k, double m, double eps) {
  const Geometry geo = geometry(traj.manifold_ptr(), m);
  require_fast_window(traj.p(), m, geo.n, eps);
  const double at = a_tilde(traj.p(), m);
  require_positive_time(traj.time(k));
  return bound_of(analyze(traj, k), traj.p(), at, eps, geo, traj.manifold());
}

double entropy_scale(const Trajectory& traj, std::size_t k, double m) {
  const double at = a_tilde(traj.p(), m);
  require_positive_time(traj.time(k));
  return scale_of(analyze(traj, k), at, traj.manifold());
}

double Lemma41::relative_mismatch() const noexcept { return relative_spread({fd, middle, right}); }

double Lemma42::relative_mismatch() const noexcept { return relative_spread({fd, formula}); }

Lemma41 lemma41_check(const Trajectory& traj, std::size_t k) {
  require_interior(traj, k);
  const double p = traj.p();
  const Manifold& man = traj.manifold();
  auto mass = [&](std::size_t j) {
    const ScalarField v = pressure(traj.u(j), p);
    std::vector<double> uv(v.size());
    for (std::size_t i = 0; i < uv.size(); ++i) uv[i] = traj.u(j)[i] * v[i];
    return integrate(man, uv);
  };
  const double fd = (mass(k + 1) - mass(k - 1)) / (traj.time(k + 1) - traj.time(k - 1));
  const Snapshot s = analyze(traj, k);
  std::vector<double> mid(s.uv.size()), right(s.uv.size());
  for (std::size_t i = 0; i < mid.size(); ++i) {
    mid[i] = s.lap_v[i] * s.uv[i];
    right[i] = s.grad_v.norm_squared(i) * s.u[i];
  }
  return Lemma41{fd, (p - 1.0) * integrate(man, mid), -p * integrate(man, right)};
}

Lemma42 lemma42_check(const Trajectory& traj, std::size_t k) {
  require_interior(traj, k);
  const double p = traj.p();
  const Manifold& man = traj.manifold();
  auto moment = [&](std::size_t j) {
    const Snapshot s = analyze(traj, j);
    std::vector<double> f(s.uv.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = s.lap_v[i] * s.uv[i];
    return integrate(man, f);
  };
  const double fd = (moment(k + 1) - moment(k - 1)) / (traj.time(k + 1) - traj.time(k - 1));
  const Snapshot s = analyze(traj, k);
  const SymTensorField ric = weight_hessian(traj.manifold_ptr());
  std::vector<double> f(s.uv.size());
  for (std::size_t i = 0; i < f.size(); ++i)
    f[i] = ((p - 1.0) * s.lap_v[i] * s.lap_v[i] + s.hess_v.frobenius_squared(i) +
            ric.quadratic_form(i, s.grad_v)) *
           s.uv[i];
  return Lemma42{fd, 2.0 * integrate(man, f)};
}

void EntropyTrace::write_csv(std::ostream& out) const {
  csv::Writer w(out);
  w.header({"t", "N", "W", "dN_formula", "dN_fd", "dW_formula", "dW_fd", "bound_fast",
            "monotone_flag"});
  for (std::size_t j = 0; j < times.size(); ++j)
    w.cell(times[j])
        .cell(N[j])
        .cell(W[j])
        .cell(dN_formula[j])
        .cell(dN_fd[j])
        .cell(dW_formula[j])
        .cell(dW_fd[j])
        .cell(bound_fast[j])
        .cell(static_cast<long long>(monotone[j]))
        .end_row();
}

EntropyTrace entropy_trace(const Trajectory& traj, double m, std::optional<double> eps,
                           double t_min, double tol) {
  const Geometry geo = geometry(traj.manifold_ptr(), m);
  const double p = traj.p();
  const double at = a_tilde(p, m);
  if (eps) require_fast_window(p, m, geo.n, *eps);
  const Manifold& man = traj.manifold();

  const std::size_t K = traj.size();
  std::vector<double> N(K, kNaN), W(K, kNaN);
  for (std::size_t k = 0; k < K; ++k) {
    if (!(traj.time(k) > 0.0)) continue;
    const Snapshot s = analyze(traj, k);
    N[k] = N_of(s, at, man);
    W[k] = W_of(s, p, at, man);
  }

  EntropyTrace tr;
  tr.m = m;
  tr.eps = eps;
  for (std::size_t k = 0; k < K; ++k) {
    const double t = traj.time(k);
    if (!(t > 0.0) || t < t_min) continue;
    const Snapshot s = analyze(traj, k);
    const bool interior = k >= 1 && k + 1 < K && traj.time(k - 1) > 0.0;
    const double span = interior ? traj.time(k + 1) - traj.time(k - 1) : kNaN;
    const double dn = dN_of(s, p, at, man);
    const double dw = dW_of(s, p, at, geo, man);
    const double scale = scale_of(s, at, man);
    tr.times.push_back(t);
    tr.N.push_back(N[k]);
    tr.W.push_back(W[k]);
    tr.dN_formula.push_back(dn);
    tr.dW_formula.push_back(dw);
    tr.dN_fd.push_back(interior ? (N[k + 1] - N[k - 1]) / span : kNaN);
    tr.dW_fd.push_back(interior ? (W[k + 1] - W[k - 1]) / span : kNaN);
    tr.bound_fast.push_back(eps ? bound_of(s, p, at, *eps, geo, man) : kNaN);
    tr.scale.push_back(scale);
    tr.monotone.push_back(dn <= tol * scale && dw <= tol * scale);
  }
  return tr;
}

}  // namespace pmeflow
