#include "pmeflow/pmeflow.h"

#include <algorithm>
#include <memory>
#include <new>
#include <stdexcept>
#include <string>
#include <vector>

#include "pmeflow/csv.hpp"
#include "pmeflow/curvature.hpp"
#include "pmeflow/entropy.hpp"
#include "pmeflow/error.hpp"
#include "pmeflow/estimates.hpp"
#include "pmeflow/harness.hpp"
#include "pmeflow/operators.hpp"

struct pmf_manifold {
  pmeflow::ManifoldPtr ptr;
};

struct pmf_trajectory {
  pmeflow::Trajectory traj;
};

struct pmf_report {
  pmeflow::RunReport report;
  std::string json;
};

struct pmf_sweep {
  std::vector<pmeflow::SweepPoint> points;
  std::vector<std::unique_ptr<pmf_report>> reports;  // parallel to points, null when skipped
};

namespace {

using namespace pmeflow;

thread_local std::string g_last_error;

pmf_status fail(pmf_status status, const char* what) {
  g_last_error = what;
  return status;
}

struct NullArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

template <class F>
pmf_status guard(F&& body) noexcept {
  try {
    body();
    g_last_error.clear();
    return PMF_OK;
  } catch (const PositivityError& e) {
    return fail(PMF_ERR_POSITIVITY, e.what());
  } catch (const NumericalError& e) {
    return fail(PMF_ERR_NUMERICAL, e.what());
  } catch (const ParameterError& e) {
    return fail(PMF_ERR_PARAMETER, e.what());
  } catch (const ScenarioError& e) {
    return fail(PMF_ERR_SCENARIO, e.what());
  } catch (const IoError& e) {
    return fail(PMF_ERR_IO, e.what());
  } catch (const NullArgument& e) {
    return fail(PMF_ERR_NULL, e.what());
  } catch (const std::out_of_range& e) {
    return fail(PMF_ERR_RANGE, e.what());
  } catch (const std::bad_alloc&) {
    return fail(PMF_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(PMF_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(PMF_ERR_INTERNAL, "unknown error");
  }
}

template <class... P>
void require(P*... ptrs) {
  if (((ptrs == nullptr) || ...)) throw NullArgument("null argument");
}

ScalarField field(const pmf_manifold* m, const double* values, std::size_t count) {
  require(m, values);
  if (count != m->ptr->node_count())
    throw ParameterError("expected " + std::to_string(m->ptr->node_count()) + " values, got " +
                         std::to_string(count));
  return ScalarField(m->ptr, std::vector<double>(values, values + count));
}

void copy_out(const ScalarField& f, double* out) {
  std::copy(f.values().begin(), f.values().end(), out);
}

ManifoldSpec spec(pmf_manifold_kind kind, const double lengths[2], const int points[2]) {
  require(lengths, points);
  if (kind != PMF_CIRCLE && kind != PMF_TORUS2) throw ParameterError("unknown manifold kind");
  ManifoldSpec s;
  s.kind = kind == PMF_CIRCLE ? ManifoldKind::circle : ManifoldKind::torus2;
  s.lengths = {lengths[0], lengths[1]};
  s.points = {points[0], points[1]};
  return s;
}

Theorem theorem(const char* text) {
  require(text);
  const auto id = parse_theorem(text);
  if (!id) throw ParameterError(std::string("unknown theorem '") + text + "'");
  return *id;
}

EstimateParams estimate_params(const pmf_estimate_params* p) {
  require(p);
  EstimateParams e;
  e.p = p->p;
  e.m = p->m;
  e.alpha = p->alpha;
  e.K = p->K;
  if (p->M > 0.0) e.M = p->M;
  e.t_check_min = p->t_check_min;
  if (p->tol >= 0.0) e.tol = p->tol;
  return e;
}

RunOptions options(const char* out_dir, const uint64_t* seed) {
  RunOptions o;
  if (out_dir) o.out_dir = out_dir;
  if (seed) o.seed = *seed;
  return o;
}

pmf_report* wrap(RunReport r) {
  auto* h = new pmf_report{std::move(r), {}};
  h->json = h->report.to_json();
  return h;
}

}  // namespace

extern "C" {

const char* pmf_version(void) { return "0.1.0"; }

const char* pmf_last_error(void) { return g_last_error.c_str(); }

const char* pmf_status_name(pmf_status status) {
  switch (status) {
    case PMF_OK: return "ok";
    case PMF_ERR_PARAMETER: return "parameter error";
    case PMF_ERR_NUMERICAL: return "numerical error";
    case PMF_ERR_POSITIVITY: return "positivity breach";
    case PMF_ERR_SCENARIO: return "scenario error";
    case PMF_ERR_IO: return "i/o error";
    case PMF_ERR_NULL: return "null argument";
    case PMF_ERR_RANGE: return "index out of range";
    case PMF_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

pmf_status pmf_manifold_create(pmf_manifold_kind kind, const double lengths[2],
                               const int points[2], pmf_weight_kind phi, double phi_amplitude,
                               pmf_manifold** out) {
  return guard([&] {
    require(out);
    ManifoldSpec s = spec(kind, lengths, points);
    switch (phi) {
      case PMF_PHI_ZERO: s.phi.kind = WeightKind::zero; break;
      case PMF_PHI_CONSTANT: s.phi.kind = WeightKind::constant; break;
      case PMF_PHI_SIN: s.phi.kind = WeightKind::sin_first; break;
      default: throw ParameterError("unknown weight kind");
    }
    s.phi.amplitude = phi_amplitude;
    *out = new pmf_manifold{Manifold::create(std::move(s))};
  });
}

pmf_status pmf_manifold_create_samples(pmf_manifold_kind kind, const double lengths[2],
                                       const int points[2], const double* phi, size_t count,
                                       pmf_manifold** out) {
  return guard([&] {
    require(out, phi);
    ManifoldSpec s = spec(kind, lengths, points);
    s.phi.kind = WeightKind::samples;
    s.phi.samples.assign(phi, phi + count);
    *out = new pmf_manifold{Manifold::create(std::move(s))};
  });
}

void pmf_manifold_destroy(pmf_manifold* manifold) { delete manifold; }

pmf_status pmf_manifold_node_count(const pmf_manifold* manifold, size_t* out) {
  return guard([&] {
    require(manifold, out);
    *out = manifold->ptr->node_count();
  });
}

pmf_status pmf_manifold_dimension(const pmf_manifold* manifold, int* out) {
  return guard([&] {
    require(manifold, out);
    *out = manifold->ptr->dimension();
  });
}

pmf_status pmf_manifold_coordinates(const pmf_manifold* manifold, size_t node, double xy[2]) {
  return guard([&] {
    require(manifold, xy);
    if (node >= manifold->ptr->node_count()) throw std::out_of_range("node index out of range");
    const auto c = manifold->ptr->coordinates(node);
    xy[0] = c[0];
    xy[1] = c[1];
  });
}

pmf_status pmf_witten_laplacian(const pmf_manifold* manifold, const double* f, double* out,
                                size_t count) {
  return guard([&] {
    require(out);
    copy_out(witten_laplacian(field(manifold, f, count)), out);
  });
}

pmf_status pmf_gradient(const pmf_manifold* manifold, const double* f, double* out,
                        size_t count) {
  return guard([&] {
    require(out);
    const VectorField g = gradient(field(manifold, f, count));
    for (int a = 0; a < manifold->ptr->dimension(); ++a) {
      const auto comp = g.component(a);
      std::copy(comp.begin(), comp.end(), out + a * count);
    }
  });
}

pmf_status pmf_weighted_integral(const pmf_manifold* manifold, const double* f, size_t count,
                                 double* out) {
  return guard([&] {
    require(out);
    *out = weighted_integral(field(manifold, f, count));
  });
}

pmf_status pmf_symmetry_defect(const pmf_manifold* manifold, const double* u, const double* v,
                               size_t count, double* out) {
  return guard([&] {
    require(out);
    *out = symmetry_defect(field(manifold, u, count), field(manifold, v, count));
  });
}

pmf_status pmf_bakry_emery(const pmf_manifold* manifold, double m, pmf_curvature* out) {
  return guard([&] {
    require(manifold, out);
    const CurvatureReport r = bakry_emery(manifold->ptr, m);
    *out = pmf_curvature{r.m, r.lambda_min, r.K, r.tol_eig, r.nonneg ? 1 : 0};
  });
}

pmf_status pmf_bochner_defect(const pmf_manifold* manifold, const double* w, size_t count,
                              double m, double* equality, double* slack) {
  return guard([&] {
    const BochnerDefect d = bochner_defect(field(manifold, w, count), m);
    if (equality) copy_out(d.equality, equality);
    if (slack) copy_out(d.slack, slack);
  });
}

void pmf_solver_config_default(pmf_solver_config* config) {
  if (!config) return;
  const SolverConfig d;
  *config = pmf_solver_config{d.p,           PMF_EULER,     0.0, d.cfl_fraction,
                              d.t_end,       d.positivity_floor, d.snapshot_stride};
}

pmf_status pmf_solve(const pmf_manifold* manifold, const double* u0, size_t count,
                     const pmf_solver_config* config, pmf_trajectory** out) {
  return guard([&] {
    require(config, out);
    SolverConfig c;
    c.p = config->p;
    c.scheme = config->scheme == PMF_RK4 ? TimeScheme::rk4 : TimeScheme::explicit_euler;
    if (config->dt > 0.0) c.dt = config->dt;
    c.cfl_fraction = config->cfl_fraction;
    c.t_end = config->t_end;
    c.positivity_floor = config->positivity_floor;
    c.snapshot_stride = config->snapshot_stride;
    *out = new pmf_trajectory{solve(field(manifold, u0, count), c)};
  });
}

void pmf_trajectory_destroy(pmf_trajectory* trajectory) { delete trajectory; }

pmf_status pmf_trajectory_size(const pmf_trajectory* t, size_t* out) {
  return guard([&] {
    require(t, out);
    *out = t->traj.size();
  });
}

pmf_status pmf_trajectory_time(const pmf_trajectory* t, size_t k, double* out) {
  return guard([&] {
    require(t, out);
    *out = t->traj.time(k);
  });
}

pmf_status pmf_trajectory_dt(const pmf_trajectory* t, double* out) {
  return guard([&] {
    require(t, out);
    *out = t->traj.metadata().dt;
  });
}

pmf_status pmf_trajectory_snapshot(const pmf_trajectory* t, size_t k, double* out,
                                   size_t count) {
  return guard([&] {
    require(t, out);
    const ScalarField& u = t->traj.u(k);
    if (count != u.size()) throw ParameterError("snapshot buffer has the wrong length");
    copy_out(u, out);
  });
}

pmf_status pmf_trajectory_write_csv(const pmf_trajectory* t, const char* path) {
  return guard([&] {
    require(t, path);
    auto out = csv::open_output(path);
    t->traj.write_csv(out);
    if (!out) throw IoError(std::string("failed writing ") + path);
  });
}

pmf_status pmf_pressure_residual_norm(const pmf_trajectory* t, size_t k, double* residual,
                                      double* pressure_max) {
  return guard([&] {
    require(t, residual, pressure_max);
    if (k < 1 || k + 1 >= t->traj.size()) throw std::out_of_range("need 1 <= k <= size-2");
    *residual = pressure_residual(t->traj, k).max_abs();
    *pressure_max = pressure(t->traj.u(k), t->traj.p()).max_abs();
  });
}

pmf_status pmf_a_tilde(double p, double m, double* out) {
  return guard([&] {
    require(out);
    *out = a_tilde(p, m);
  });
}

pmf_status pmf_theorem_rhs(const char* id, const pmf_estimate_params* params, double t,
                           double* alpha_out, double* rhs_out) {
  return guard([&] {
    require(alpha_out, rhs_out);
    const TheoremBound b = theorem_rhs(theorem(id), estimate_params(params), t);
    *alpha_out = b.alpha;
    *rhs_out = b.rhs;
  });
}

pmf_status pmf_check_estimate(const pmf_trajectory* t, const char* id,
                              const pmf_estimate_params* params, pmf_estimate_summary* out) {
  return guard([&] {
    require(t, out);
    const EstimateReport r = check_estimate(t->traj, theorem(id), estimate_params(params));
    *out = pmf_estimate_summary{r.global_min_margin, r.argmin_time, r.argmin_node_global,
                                r.M, r.tol, r.pass ? 1 : 0};
  });
}

pmf_status pmf_feasibility_A(double p, double m, double alpha, double eps1, double eps2,
                             double* out) {
  return guard([&] {
    require(out);
    *out = feasibility_A(p, m, alpha, eps1, eps2);
  });
}

pmf_status pmf_entropy_N(const pmf_trajectory* t, size_t k, double m, double* out) {
  return guard([&] {
    require(t, out);
    *out = entropy_N(t->traj, k, m);
  });
}

pmf_status pmf_entropy_W(const pmf_trajectory* t, size_t k, double m, double* out) {
  return guard([&] {
    require(t, out);
    *out = entropy_W(t->traj, k, m);
  });
}

pmf_status pmf_dN_formula(const pmf_trajectory* t, size_t k, double m, double* out) {
  return guard([&] {
    require(t, out);
    *out = dN_formula(t->traj, k, m);
  });
}

pmf_status pmf_dW_formula(const pmf_trajectory* t, size_t k, double m, double* out) {
  return guard([&] {
    require(t, out);
    *out = dW_formula(t->traj, k, m);
  });
}

pmf_status pmf_dW_upper_bound_fast(const pmf_trajectory* t, size_t k, double m, double eps,
                                   double* out) {
  return guard([&] {
    require(t, out);
    *out = dW_upper_bound_fast(t->traj, k, m, eps);
  });
}

pmf_status pmf_lemma41(const pmf_trajectory* t, size_t k, double out[3]) {
  return guard([&] {
    require(t, out);
    const Lemma41 l = lemma41_check(t->traj, k);
    out[0] = l.fd;
    out[1] = l.middle;
    out[2] = l.right;
  });
}

pmf_status pmf_lemma42(const pmf_trajectory* t, size_t k, double out[2]) {
  return guard([&] {
    require(t, out);
    const Lemma42 l = lemma42_check(t->traj, k);
    out[0] = l.fd;
    out[1] = l.formula;
  });
}

pmf_status pmf_run_scenario(const char* path, const char* out_dir, const uint64_t* seed,
                            pmf_report** out) {
  return guard([&] {
    require(path, out);
    *out = wrap(run_file(path, options(out_dir, seed)));
  });
}

pmf_status pmf_run_scenario_text(const char* text, const char* base_dir, const char* out_dir,
                                 const uint64_t* seed, pmf_report** out) {
  return guard([&] {
    require(text, out);
    const Scenario s = parse_scenario(text, base_dir ? base_dir : "");
    *out = wrap(run(s, options(out_dir, seed)));
  });
}

pmf_status pmf_identities(uint64_t seed, const char* out_dir, pmf_report** out) {
  return guard([&] {
    require(out);
    *out = wrap(identities(seed, options(out_dir, nullptr)));
  });
}

uint64_t pmf_default_identity_seed(void) { return kDefaultIdentitySeed; }

void pmf_report_destroy(pmf_report* report) { delete report; }

int pmf_report_pass(const pmf_report* report) { return report && report->report.pass ? 1 : 0; }

size_t pmf_report_check_count(const pmf_report* report) {
  return report ? report->report.checks.size() : 0;
}

pmf_status pmf_report_check(const pmf_report* report, size_t i, pmf_check_info* out) {
  return guard([&] {
    require(report, out);
    const CheckResult& c = report->report.checks.at(i);
    *out = pmf_check_info{c.id.c_str(), c.kind.c_str(), c.pass ? 1 : 0,
                          c.min_margin, c.tol,          c.argmin_time};
  });
}

const char* pmf_report_json(const pmf_report* report) {
  return report ? report->json.c_str() : "";
}

pmf_status pmf_sweep_run(const char* path, const char* axis, const double* values, size_t count,
                         const char* out_dir, const uint64_t* seed, pmf_sweep** out) {
  return guard([&] {
    require(path, axis, out);
    if (count > 0) require(values);
    const std::string a = axis;
    SweepAxis ax;
    if (a == "p") ax = SweepAxis::p;
    else if (a == "m") ax = SweepAxis::m;
    else if (a == "alpha") ax = SweepAxis::alpha;
    else throw ParameterError("sweep axis must be p, m or alpha, got '" + a + "'");
    const Scenario base = load_scenario(path);
    auto h = std::make_unique<pmf_sweep>();
    h->points = sweep(base, ax, std::vector<double>(values, values + count), options(out_dir, seed));
    for (auto& pt : h->points)
      h->reports.emplace_back(pt.report ? wrap(*pt.report) : nullptr);
    *out = h.release();
  });
}

void pmf_sweep_destroy(pmf_sweep* s) { delete s; }

size_t pmf_sweep_size(const pmf_sweep* s) { return s ? s->points.size() : 0; }

pmf_status pmf_sweep_point(const pmf_sweep* s, size_t i, double* value, int* ran,
                           const pmf_report** report) {
  return guard([&] {
    require(s);
    const auto& pt = s->points.at(i);
    if (value) *value = pt.value;
    if (ran) *ran = pt.report ? 1 : 0;
    if (report) *report = s->reports.at(i).get();
  });
}

const char* pmf_sweep_skip_reason(const pmf_sweep* s, size_t i) {
  if (!s || i >= s->points.size()) return "";
  return s->points[i].skipped.c_str();
}

}  // extern "C"
