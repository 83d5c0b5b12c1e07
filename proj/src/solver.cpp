#include "pmeflow/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pmeflow/csv.hpp"
#include "pmeflow/error.hpp"
#include "pmeflow/operators.hpp"

namespace pmeflow {

void require_exponent(double p) {
  if (!(p > 0.0) || p == 1.0 || !std::isfinite(p))
    throw ParameterError("p≠1 required (exponent must satisfy p > 0 and p ≠ 1, got p=" +
                         csv::format(p) + ")");
}

void SolverConfig::validate() const {
  require_exponent(p);
  if (dt && !(*dt > 0.0 && std::isfinite(*dt))) throw ParameterError("dt must be positive");
  if (!(cfl_fraction > 0.0) || !std::isfinite(cfl_fraction))
    throw ParameterError("cfl_fraction must be positive");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ParameterError("t_end must be positive");
  if (!(positivity_floor > 0.0)) throw ParameterError("positivity floor must be positive");
  if (snapshot_stride < 1) throw ParameterError("snapshot stride must be at least 1");
}

Trajectory::Trajectory(ManifoldPtr manifold, SolverConfig config, SolverMetadata metadata,
                       std::vector<double> times, std::vector<ScalarField> snapshots)
    : manifold_(std::move(manifold)),
      config_(config),
      metadata_(std::move(metadata)),
      times_(std::move(times)),
      snapshots_(std::move(snapshots)) {
  if (times_.size() != snapshots_.size() || times_.empty())
    throw ParameterError("trajectory needs one time per snapshot");
  if (times_.front() != 0.0) throw ParameterError("trajectory must start at t = 0");
  for (std::size_t k = 1; k < times_.size(); ++k)
    if (!(times_[k] > times_[k - 1]))
      throw ParameterError("trajectory times must be strictly increasing");
}

std::size_t Trajectory::nearest(double t) const noexcept {
  const auto it = std::lower_bound(times_.begin(), times_.end(), t);
  if (it == times_.end()) return times_.size() - 1;
  const auto k = static_cast<std::size_t>(it - times_.begin());
  if (k > 0 && t - times_[k - 1] <= *it - t) return k - 1;
  return k;
}

void Trajectory::write_csv(std::ostream& out) const {
  csv::Writer w(out);
  if (manifold_->dimension() == 1)
    w.header({"t", "node_index", "x", "u"});
  else
    w.header({"t", "node_index", "x", "y", "u"});
  for (std::size_t k = 0; k < times_.size(); ++k) {
    const auto& u = snapshots_[k];
    for (std::size_t i = 0; i < u.size(); ++i) {
      const auto xy = manifold_->coordinates(i);
      w.cell(times_[k]).cell(static_cast<long long>(i)).cell(xy[0]);
      if (manifold_->dimension() == 2) w.cell(xy[1]);
      w.cell(u[i]).end_row();
    }
  }
}

namespace {

double max_diffusivity(std::span<const double> u, double p) {
  double d = 0.0;
  for (double x : u) d = std::max(d, p * std::pow(x, p - 1.0));
  return d;
}

double weight_gradient_norm(const Manifold& m) {
  const std::size_t n = m.node_count();
  std::vector<double> norm_sq(n, 0.0), d(n);
  for (int a = 0; a < m.dimension(); ++a) {
    centered_difference(m, a, m.phi(), d);
    for (std::size_t i = 0; i < n; ++i) norm_sq[i] += d[i] * d[i];
  }
  return std::sqrt(*std::max_element(norm_sq.begin(), norm_sq.end()));
}

double stiffness(const ScalarField& u0, double p) {
  const Manifold& m = u0.manifold();
  double inv_h2 = 0.0;
  for (int a = 0; a < m.dimension(); ++a) inv_h2 += 1.0 / (m.spacing(a) * m.spacing(a));
  return max_diffusivity(u0.values(), p) * inv_h2 *
         (1.0 + weight_gradient_norm(m) * m.min_spacing());
}

class Stepper {
 public:
  Stepper(ManifoldPtr manifold, double p)
      : lap_(std::move(manifold)), p_(p), n_(lap_.manifold().node_count()),
        power_(n_), k1_(n_), k2_(n_), k3_(n_), k4_(n_), stage_(n_) {}

  void euler(std::vector<double>& u, double dt) {
    rate(u, k1_);
    for (std::size_t i = 0; i < n_; ++i) u[i] += dt * k1_[i];
  }

  void rk4(std::vector<double>& u, double dt) {
    rate(u, k1_);
    for (std::size_t i = 0; i < n_; ++i) stage_[i] = u[i] + 0.5 * dt * k1_[i];
    rate(stage_, k2_);
    for (std::size_t i = 0; i < n_; ++i) stage_[i] = u[i] + 0.5 * dt * k2_[i];
    rate(stage_, k3_);
    for (std::size_t i = 0; i < n_; ++i) stage_[i] = u[i] + dt * k3_[i];
    rate(stage_, k4_);
    for (std::size_t i = 0; i < n_; ++i)
      u[i] += dt / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
  }

 private:
  // out = Δ_φ(u^p)
  void rate(std::span<const double> u, std::vector<double>& out) {
    for (std::size_t i = 0; i < n_; ++i) power_[i] = std::pow(u[i], p_);
    lap_.apply(power_, out);
  }

  WittenLaplacian lap_;
  double p_;
  std::size_t n_;
  std::vector<double> power_, k1_, k2_, k3_, k4_, stage_;
};

}  // namespace

double automatic_time_step(const ScalarField& u0, const SolverConfig& config) {
  const Manifold& m = u0.manifold();
  const double h = m.min_spacing();
  return config.cfl_fraction * h * h /
         (max_diffusivity(u0.values(), config.p) * (1.0 + weight_gradient_norm(m) * h));
}

Trajectory solve(const ScalarField& u0, const SolverConfig& config) {
  config.validate();
  if (!(u0.min() > config.positivity_floor))
    throw ParameterError("initial data must stay above the positivity floor");

  SolverMetadata meta;
  meta.auto_dt = !config.dt.has_value();
  meta.dt = config.dt ? *config.dt : automatic_time_step(u0, config);
  meta.steps = static_cast<long long>(std::ceil(config.t_end / meta.dt - 1e-9));
  const double growth = config.scheme == TimeScheme::rk4 ? 2.785 : 2.0;
  meta.stability_bound = growth / stiffness(u0, config.p);
  if (meta.dt > meta.stability_bound) {
    std::ostringstream msg;
    msg << "dt=" << csv::format(meta.dt) << " exceeds the explicit stability estimate "
        << csv::format(meta.stability_bound);
    meta.warnings.push_back(msg.str());
  }

  std::vector<double> times{0.0};
  std::vector<ScalarField> snaps{u0};
  std::vector<double> u(u0.values().begin(), u0.values().end());
  Stepper stepper(u0.manifold_ptr(), config.p);

  for (long long step = 1; step <= meta.steps; ++step) {
    if (config.scheme == TimeScheme::rk4)
      stepper.rk4(u, meta.dt);
    else
      stepper.euler(u, meta.dt);

    const double t = static_cast<double>(step) * meta.dt;
    double lo = u[0];
    for (double x : u) {
      if (!std::isfinite(x)) throw NumericalError("non-finite value at t=" + csv::format(t));
      lo = std::min(lo, x);
    }
    if (lo <= config.positivity_floor) throw PositivityError(t, lo);
    if (step % config.snapshot_stride == 0) {
      times.push_back(t);
      snaps.emplace_back(u0.manifold_ptr(), u);
    }
  }
  return Trajectory(u0.manifold_ptr(), config, std::move(meta), std::move(times),
                    std::move(snaps));
}

ScalarField pressure(const ScalarField& u, double p) {
  require_exponent(p);
  std::vector<double> v(u.size());
  const double c = p / (p - 1.0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(u[i] > 0.0)) throw ParameterError("pressure needs u > 0");
    v[i] = c * std::pow(u[i], p - 1.0);
  }
  return ScalarField(u.manifold_ptr(), std::move(v));
}

ScalarField pressure_rate(const Trajectory& traj, std::size_t k) {
  if (k < 1 || k + 1 >= traj.size())
    throw ParameterError("time derivative needs 1 <= k <= size-2");
  const double p = traj.p();
  const ScalarField prev = pressure(traj.u(k - 1), p);
  const ScalarField next = pressure(traj.u(k + 1), p);
  const double span = traj.time(k + 1) - traj.time(k - 1);
  std::vector<double> r(prev.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = (next[i] - prev[i]) / span;
  return ScalarField(traj.manifold_ptr(), std::move(r));
}

ScalarField pressure_residual(const Trajectory& traj, std::size_t k) {
  const ScalarField vt = pressure_rate(traj, k);
  const double p = traj.p();
  const ScalarField v = pressure(traj.u(k), p);
  const ScalarField lap = witten_laplacian(v);
  const VectorField grad = gradient(v);
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < r.size(); ++i)
    r[i] = vt[i] - (p - 1.0) * v[i] * lap[i] - grad.norm_squared(i);
  return ScalarField(traj.manifold_ptr(), std::move(r));
}

}  // namespace pmeflow
