#include "pmeflow/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pmeflow/error.hpp"
#include "pmeflow/operators.hpp"

namespace pmeflow {

void require_dimension_parameter(const Manifold& manifold, double m) {
  const int n = manifold.dimension();
  if (!std::isfinite(m)) throw ParameterError("m must be finite");
  if (m > n) return;
  if (m == n && manifold.phi_is_constant()) return;
  throw ParameterError("m must exceed n (m = n only allowed for constant phi)");
}

SymTensorField weight_hessian(const ManifoldPtr& manifold) {
  const ScalarField phi(manifold, {manifold->phi().begin(), manifold->phi().end()});
  return hessian(phi);
}

namespace {

// ∇²φ - dφ⊗dφ / (m - n), with the second term omitted when m == n.
SymTensorField bakry_emery_tensor(const ManifoldPtr& manifold, double m) {
  const ScalarField phi(manifold, {manifold->phi().begin(), manifold->phi().end()});
  const SymTensorField h = hessian(phi);
  const int n = manifold->dimension();
  if (m == n) return h;

  const VectorField g = gradient(phi);
  const double inv = 1.0 / (m - n);
  const std::size_t count = manifold->node_count();
  std::vector<std::vector<double>> entries;
  for (int r = 0; r < n; ++r) {
    for (int c = r; c < n; ++c) {
      std::vector<double> e(count);
      for (std::size_t i = 0; i < count; ++i)
        e[i] = h.entry(i, r, c) - inv * g.component(r)[i] * g.component(c)[i];
      entries.push_back(std::move(e));
    }
  }
  return SymTensorField(manifold, std::move(entries));
}

}  // namespace

CurvatureReport bakry_emery(const ManifoldPtr& manifold, double m) {
  require_dimension_parameter(*manifold, m);
  SymTensorField tensor = bakry_emery_tensor(manifold, m);
  double lambda_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < manifold->node_count(); ++i)
    lambda_min = std::min(lambda_min, tensor.min_eigenvalue(i));
  const double tol = 1e-12 * (1.0 + tensor.max_abs());
  const double K = std::max(0.0, -lambda_min);
  return CurvatureReport{m, std::move(tensor), lambda_min, K, lambda_min >= -tol, tol};
}

BochnerDefect bochner_defect(const ScalarField& w, double m) {
  const ManifoldPtr& man = w.manifold_ptr();
  require_dimension_parameter(*man, m);

  const VectorField grad_w = gradient(w);
  const SymTensorField hess_w = hessian(w);
  const ScalarField lap_w = witten_laplacian(w);
  const VectorField grad_lap_w = gradient(lap_w);
  const SymTensorField ric = weight_hessian(man);
  const SymTensorField ric_m = bakry_emery_tensor(man, m);

  const std::size_t n = w.size();
  std::vector<double> grad_sq(n);
  for (std::size_t i = 0; i < n; ++i) grad_sq[i] = grad_w.norm_squared(i);
  const ScalarField lap_grad_sq = witten_laplacian(ScalarField(man, std::move(grad_sq)));

  std::vector<double> eq(n), slack(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double common = 0.5 * lap_grad_sq[i] - grad_w.dot(i, grad_lap_w);
    eq[i] = common - hess_w.frobenius_squared(i) - ric.quadratic_form(i, grad_w);
    slack[i] = common - lap_w[i] * lap_w[i] / m - ric_m.quadratic_form(i, grad_w);
  }
  return BochnerDefect{ScalarField(man, std::move(eq)), ScalarField(man, std::move(slack))};
}

}  // namespace pmeflow
