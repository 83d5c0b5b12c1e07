// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pmeflow/entropy.hpp"
#include "pmeflow/error.hpp"
#include "pmeflow/estimates.hpp"
#include "pmeflow/harness.hpp"
#include "pmeflow/operators.hpp"
#include "pmeflow/scenario.hpp"

using namespace pmeflow;
namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x + 0.0);
  return buf;
}

// --- scenario text -----------------------------------------------------------

struct Setup {
  std::string phi = "zero";
  double phi_amplitude = 0.0;
  int points = 128;
  double p = 2.0;
  double dt = 1e-5;
  double t_end = 0.1;
  int stride = 10;
  std::string initial = "kind = \"cosine\"\nbase = 1.0\namplitude = 0.5\n";
  std::string checks;
  std::string top;
};

std::string text(const Setup& s) {
  std::ostringstream o;
  o << "schema = 1\nname = \"acceptance\"\n" << s.top << "[manifold]\npoints = " << s.points
    << "\nphi = \"" << s.phi << "\"\nphi_amplitude = " << s.phi_amplitude << "\n[initial]\n"
    << s.initial << "[solver]\np = " << s.p << "\ndt = " << s.dt << "\nt_end = " << s.t_end
    << "\nstride = " << s.stride << "\n"
    << s.checks;
  return o.str();
}

std::string theorem_check(const std::string& id, double m, std::optional<double> alpha = {},
                          std::optional<double> p = {}) {
  std::ostringstream o;
  o << "[[check]]\nkind = \"theorem\"\ntheorem = \"" << id << "\"\nm = " << m << "\n";
  if (alpha) o << "alpha = " << *alpha << "\n";
  if (p) o << "p = " << *p << "\n";
  return o.str();
}

RunReport run_setup(const Setup& s) { return run(parse_scenario(text(s)), {}); }

// Folds every check of a report into the outcome; returns the smallest margin / tol.
double absorb(Outcome& out, const RunReport& r, const std::string& tag) {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& c : r.checks) {
    out.require(c.pass, tag + " " + c.id + " margin " + fmt(c.min_margin) + " tol " + fmt(c.tol));
    worst = std::min(worst, c.min_margin / c.tol);
  }
  return worst;
}

// --- direct solves ------------------------------------------------------------

ManifoldPtr circle(int n, WeightKind phi, double amp) {
  ManifoldSpec s;
  s.points = {n, 1};
  s.phi.kind = phi;
  s.phi.amplitude = amp;
  return Manifold::create(s);
}

Trajectory cosine_run(int n, WeightKind phi, double amp, double p, double dt, int stride,
                      double t_end) {
  const auto man = circle(n, phi, amp);
  SolverConfig c;
  c.p = p;
  c.dt = dt;
  c.t_end = t_end;
  c.snapshot_stride = stride;
  return solve(ScalarField::sample(man, [](double x, double) { return 1.0 + 0.5 * std::cos(x); }), c);
}

// --- criteria -----------------------------------------------------------------

Outcome identities_part(bool bochner) {
  Outcome out;
  const RunReport r = identities(kDefaultIdentitySeed, {});
  int seen = 0;
  for (const auto& c : r.checks) {
    const bool is_bochner = c.kind.rfind("bochner", 0) == 0;
    if (is_bochner != bochner) continue;
    ++seen;
    out.require(c.pass, c.id + " margin " + fmt(c.min_margin));
    if (c.observed_order) {
      out.require(*c.observed_order >= 1.8, "order " + fmt(*c.observed_order));
      out.detail << c.id << " order " << fmt(*c.observed_order) << "; ";
    }
  }
  out.require(seen > 0, "no identity checks found");
  out.detail << seen << " checks, seed " << kDefaultIdentitySeed;
  return out;
}

Outcome criterion1() { return identities_part(false); }
Outcome criterion2() { return identities_part(true); }

Outcome criterion3() {
  Outcome out;
  const Scenario s = load_scenario(fs::path(PMF_SCENARIO_DIR) / "pme_k0.toml");
  const ManifoldPtr man = build_manifold(s);
  const Trajectory tr = solve(build_initial(s, man), s.solver);
  const double steps = std::round(tr.time(tr.size() - 1) / tr.metadata().dt);
  out.require(steps >= 1e4, "only " + fmt(steps) + " steps");
  const double m0 = weighted_integral(tr.u(0));
  double drift = 0.0;
  for (std::size_t k = 0; k < tr.size(); ++k)
    drift = std::max(drift, std::abs(weighted_integral(tr.u(k)) - m0) / m0);
  out.require(drift <= 1e-10, "drift " + fmt(drift));
  out.detail << fmt(steps) << " steps, max relative drift " << fmt(drift);
  return out;
}

double pressure_ratio(const Trajectory& tr) {
  const std::size_t k = tr.nearest(0.5 * tr.time(tr.size() - 1));
  return pressure_residual(tr, k).max_abs() / pressure(tr.u(k), tr.p()).max_abs();
}

Outcome criterion4() {
  Outcome out;
  const double base = pressure_ratio(cosine_run(128, WeightKind::zero, 0.0, 2.0, 1e-5, 10, 0.1));
  const double fine = pressure_ratio(cosine_run(256, WeightKind::zero, 0.0, 2.0, 2.5e-6, 20, 0.1));
  out.require(base <= 1e-3, "residual " + fmt(base));
  out.require(base / fine >= 3.0, "reduction " + fmt(base / fine));
  out.detail << "residual/|v| " << fmt(base) << " -> " << fmt(fine) << " (x" << fmt(base / fine)
             << ")";
  return out;
}

Outcome criterion5() {
  Outcome out;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& [phi, amp] : {std::pair{"zero", 0.0}, std::pair{"sin", 0.3}})
    for (double p : {1.5, 2.0}) {
      Setup s;
      s.phi = phi;
      s.phi_amplitude = amp;
      s.p = p;
      for (const char* th : {"1.1", "1.3"})
        for (double a : {1.5, 2.0}) s.checks += theorem_check(th, 3.0, a);
      worst = std::min(worst, absorb(out, run_setup(s), std::string(phi) + " p=" + fmt(p)));
    }
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int dominated = 0;
  for (int i = 0; i < 100; ++i) {
    EstimateParams e;
    e.p = 1.0 + 1e-3 + 3 * U(rng);
    e.m = 1.0 + 1e-3 + 9 * U(rng);
    e.alpha = 1.0 + 1e-3 + 4 * U(rng);
    e.K = 2 * U(rng);
    e.M = 0.1 + 5 * U(rng);
    const double t = 1e-3 + U(rng);
    if (theorem_rhs(Theorem::t1_3, e, t).rhs <= theorem_rhs(Theorem::t1_1, e, t).rhs) ++dominated;
  }
  out.require(dominated == 100, "dominance held at " + std::to_string(dominated) + "/100");
  out.detail << "16 checks, smallest margin/tol " << fmt(worst) << "; dominance " << dominated
             << "/100";
  return out;
}

Outcome criterion6() {
  Outcome out;
  double worst = std::numeric_limits<double>::infinity();
  double K = 0.0;
  for (const auto& [phi, amp] : {std::pair{"zero", 0.0}, std::pair{"sin", 0.3}})
    for (double p : {1.5, 2.0}) {
      Setup s;
      s.phi = phi;
      s.phi_amplitude = amp;
      s.p = p;
      for (const char* th : {"1.5", "1.6", "1.7"}) s.checks += theorem_check(th, 3.0);
      const RunReport r = run_setup(s);
      worst = std::min(worst, absorb(out, r, std::string(phi) + " p=" + fmt(p)));
      if (r.K) K = std::max(K, *r.K);
    }
  out.require(K > 0.0, "no scenario with K > 0");

  // analytic limit MK -> 0 at fixed t
  const double t = 0.05;
  for (auto id : {Theorem::t1_5, Theorem::t1_6, Theorem::t1_7}) {
    EstimateParams e;
    e.p = 2.0;
    e.m = 3.0;
    e.M = 1.0;
    const double target = a_tilde(2.0, 3.0) / t;
    double prev = std::numeric_limits<double>::infinity();
    for (double MK : {1e-2, 1e-4, 1e-6, 1e-8}) {
      e.K = MK;
      const double gap = std::abs(theorem_rhs(id, e, t).rhs - target);
      out.require(gap < prev, "gap not shrinking for " + std::string(to_string(id)));
      prev = gap;
    }
    out.require(prev <= 1e-6 * target, "gap at MK=1e-8 is " + fmt(prev));
    e.K = 0.0;
    out.require(std::abs(theorem_rhs(id, e, t).rhs - target) <= 1e-15 * target,
                "MK=0 branch differs from the limit");
  }
  out.detail << "12 checks, K up to " << fmt(K) << ", smallest margin/tol " << fmt(worst)
             << "; MK->0 limit continuous";
  return out;
}

Outcome criterion7() {
  Outcome out;
  Setup a;
  a.p = 0.9;
  a.checks = theorem_check("1.2", 10.0);
  const double w12 = absorb(out, run_setup(a), "1.2");
  double w14 = std::numeric_limits<double>::infinity();
  for (double p : {0.5, 0.7, 0.9}) {
    Setup b;
    b.phi = "sin";
    b.phi_amplitude = 0.3;
    b.p = p;
    b.checks = theorem_check("1.4", 3.0, 0.5);
    w14 = std::min(w14, absorb(out, run_setup(b), "1.4 p=" + fmt(p)));
  }
  out.detail << "1.2 margin/tol " << fmt(w12) << "; 1.4 (p in {0.5,0.7,0.9}) margin/tol "
             << fmt(w14);
  return out;
}

Outcome criterion8() {
  Outcome out;
  // (a) constant data on the standard circle
  double worst_a = 0.0;
  auto rel = [](double x, double y) { return std::abs(x - y) / std::abs(y); };
  for (double p : {2.0, 1.5, 3.0, 0.7})
    for (double m : {4.0, 1.5, 2.0, 10.0}) {
      if (p <= 1.0 - 2.0 / m) continue;
      SolverConfig c;
      c.p = p;
      c.dt = 0.1;
      c.t_end = 1.0;
      const Trajectory tr = solve(ScalarField::constant(circle(16, WeightKind::zero, 0.0), 1.0), c);
      const double at = m * (p - 1) / (m * (p - 1) + 2), cc = m * (p - 1) + 2;
      const double I = 2 * pi * p / (p - 1);
      for (std::size_t k = 1; k < tr.size(); ++k) {
        const double t = tr.time(k);
        const double N = -std::pow(t, at) * I;
        const double W = -(at + 1) * std::pow(t, at) * I;
        const double dN = -at * std::pow(t, at - 1) * I;
        const double dW = -2 * std::pow(t, at + 1) * I *
                          ((p - 1) * m / (cc * t * cc * t) + (at / t) * (at / t));
        worst_a = std::max({worst_a, rel(entropy_N(tr, k, m), N), rel(entropy_W(tr, k, m), W),
                            rel(dN_formula(tr, k, m), dN), rel(dW_formula(tr, k, m), dW)});
        if (p == 2.0 && m == 4.0 && k == tr.size() - 1) {
          out.require(rel(entropy_W(tr, k, m), -20 * pi / 3) <= 1e-10, "W(1) != -20pi/3");
          out.require(rel(dW_formula(tr, k, m), -40 * pi / 9) <= 1e-10, "dW(1) != -40pi/9");
        }
      }
    }
  out.require(worst_a <= 1e-10, "closed forms off by " + fmt(worst_a));

  // (b) algebraic identity for ã
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst_b = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double m = 1.0 + 9 * U(rng);
    const double p = 1.0 - 2.0 / m + 1e-3 + (3.0 + 2.0 / m) * U(rng);
    if (std::abs(p - 1.0) < 1e-9) continue;
    const double at = a_tilde(p, m), q = m * (p - 1);
    const double rhs = 2 * q * (q + 1) / ((q + 2) * (q + 2));
    worst_b = std::max(worst_b, std::abs(at * (at + 1) - rhs) / std::max(1.0, std::abs(rhs)));
  }
  out.require(worst_b <= 1e-12, "ã identity off by " + fmt(worst_b));

  // (c) dW formula against differences of W on a weighted nonconstant run
  auto mismatch = [](const Trajectory& tr) {
    const EntropyTrace e = entropy_trace(tr, 3.0, std::nullopt, 0.01, 1e-8);
    double worst = 0.0;
    for (std::size_t j = 0; j < e.times.size(); ++j)
      if (!std::isnan(e.dW_fd[j]))
        worst = std::max(worst, std::abs(e.dW_formula[j] - e.dW_fd[j]) / std::abs(e.dW_formula[j]));
    return worst;
  };
  const double base = mismatch(cosine_run(256, WeightKind::sin_first, 0.3, 2.0, 1e-5, 10, 0.05));
  const double fine = mismatch(cosine_run(512, WeightKind::sin_first, 0.3, 2.0, 2.5e-6, 20, 0.05));
  out.require(base <= 1e-2, "dW mismatch " + fmt(base));
  out.require(fine < base, "no improvement under refinement");
  out.detail << "closed forms " << fmt(worst_a) << "; ã identity " << fmt(worst_b)
             << "; dW mismatch " << fmt(base) << " -> " << fmt(fine);
  return out;
}

Outcome criterion9() {
  Outcome out;
  Setup s;
  s.phi = "constant";
  s.phi_amplitude = 0.25;
  s.t_end = 0.05;
  s.top = "seed = 7\n";
  s.initial = "kind = \"random_trig\"\nbase = 1.0\namplitude = 0.4\nmax_mode = 3\n";
  int n = 0;
  for (double p : {1.5, 2.0})
    for (double m : {1.5, 2.0, 10.0}) {
      std::ostringstream c;
      c << "[[check]]\nkind = \"entropy\"\np = " << p << "\nm = " << m << "\ntol = 1e-8\n";
      s.checks += c.str();
      ++n;
    }
  struct Fast {
    double p, m, eps;
  };
  for (const Fast f : {Fast{0.6, 1.5, 1.0}, Fast{0.75, 1.5, 2.0}, Fast{0.5, 2.0, 1.0}, Fast{0.65, 2.0, 1.5}}) {
    std::ostringstream c;
    c << "[[check]]\nkind = \"entropy\"\np = " << f.p << "\nm = " << f.m << "\neps = " << f.eps
      << "\ntol = 1e-8\n";
    s.checks += c.str();
    ++n;
  }
  const double worst = absorb(out, run_setup(s), "entropy");
  out.detail << n << " entropy checks at tol 1e-8, smallest margin/tol " << fmt(worst);
  return out;
}

Outcome criterion10() {
  Outcome out;
  struct Worst {
    double l41 = 0.0, l42 = 0.0;
  };
  auto measure = [](const Trajectory& tr) {
    Worst w;
    for (std::size_t k = 1; k + 1 < tr.size(); ++k) {
      if (tr.time(k) < 0.01) continue;
      w.l41 = std::max(w.l41, lemma41_check(tr, k).relative_mismatch());
      w.l42 = std::max(w.l42, lemma42_check(tr, k).relative_mismatch());
    }
    return w;
  };
  const Worst coarse = measure(cosine_run(128, WeightKind::sin_first, 0.3, 2.0, 4e-5, 5, 0.1));
  const Worst base = measure(cosine_run(256, WeightKind::sin_first, 0.3, 2.0, 1e-5, 10, 0.1));
  const double o41 = std::log2(coarse.l41 / base.l41), o42 = std::log2(coarse.l42 / base.l42);
  out.require(base.l41 <= 1e-2, "three-way mismatch " + fmt(base.l41));
  out.require(base.l42 <= 1e-2, "two-way mismatch " + fmt(base.l42));
  out.require(o41 >= 1.8, "three-way order " + fmt(o41));
  out.require(o42 >= 1.8, "two-way order " + fmt(o42));
  out.detail << "mismatch " << fmt(base.l41) << " / " << fmt(base.l42) << ", order " << fmt(o41)
             << " / " << fmt(o42);
  return out;
}

int cli(const std::string& args) {
  const std::string cmd = std::string("\"") + PMF_CLI + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::vector<double>> numbers(const fs::path& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
    rows.push_back(std::move(row));
  }
  return rows;
}

Outcome criterion11() {
  Outcome out;
  const fs::path scn = PMF_SCENARIO_DIR;
  const fs::path tmp = fs::temp_directory_path() / "pmeflow_acceptance";
  fs::remove_all(tmp);
  const int omnibus = cli("run \"" + (scn / "constant_omnibus.toml").string() + "\"");
  const int p1 = cli("run \"" + (scn / "invalid_p1.toml").string() + "\"");
  out.require(omnibus == 0, "omnibus exit " + std::to_string(omnibus));
  out.require(p1 == 2, "p=1 exit " + std::to_string(p1));

  const fs::path a = tmp / "a", b = tmp / "b";
  const std::string seeded = (scn / "entropy_monotone.toml").string();
  cli("run \"" + seeded + "\" --seed 99 --out \"" + a.string() + "\"");
  cli("run \"" + seeded + "\" --seed 99 --out \"" + b.string() + "\"");
  std::size_t files = 0;
  double worst = 0.0;
  bool shape = true;
  for (const auto& entry : fs::directory_iterator(a)) {
    if (entry.path().extension() != ".csv") continue;
    ++files;
    const auto x = numbers(entry.path()), y = numbers(b / entry.path().filename());
    if (x.size() != y.size()) shape = false;
    for (std::size_t i = 0; shape && i < x.size(); ++i) {
      if (x[i].size() != y[i].size()) shape = false;
      for (std::size_t j = 0; shape && j < x[i].size(); ++j) {
        const double u = x[i][j], v = y[i][j];
        if (std::isnan(u) && std::isnan(v)) continue;
        const double d = u == v ? 0.0 : std::abs(u - v) / std::max(std::abs(u), std::abs(v));
        worst = std::max(worst, std::isnan(d) ? 1.0 : d);
      }
    }
  }
  out.require(files >= 2, "expected CSV output");
  out.require(shape, "CSV shapes differ");
  out.require(worst <= 1e-15, "CSV values differ by " + fmt(worst));
  fs::remove_all(tmp);
  out.detail << "omnibus exit " << omnibus << ", p=1 exit " << p1 << ", " << files
             << " CSVs identical (max rel diff " << fmt(worst) << ")";
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"operator identities", criterion1},     {"Bochner defect and slack", criterion2},
      {"mass conservation", criterion3},       {"pressure equation residual", criterion4},
      {"fixed-alpha porous estimates", criterion5},
      {"time-dependent porous estimates", criterion6},
      {"fast-diffusion estimates", criterion7}, {"entropy identities", criterion8},
      {"entropy monotonicity", criterion9},    {"integral rate identities", criterion10},
      {"harness contract", criterion11},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << (i + 1) << " (" << criteria[i].first
              << "): " << o.detail.str() << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed")
            << std::endl;
  return failed == 0 ? 0 : 1;
}
