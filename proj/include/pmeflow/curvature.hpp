#pragma once

#include "pmeflow/field.hpp"

namespace pmeflow {

/// m-dimensional Bakry–Émery tensor of the weight on a flat model,
/// Ric_φ^m = ∇²φ - dφ⊗dφ / (m - n), and its spectral lower bound.
struct CurvatureReport {
  double m;
  SymTensorField tensor;
  double lambda_min;  // min over nodes of the smallest eigenvalue
  double K;           // max(0, -lambda_min)
  bool nonneg;        // lambda_min >= -tol_eig
  double tol_eig;     // 1e-12 * (1 + |tensor|_inf)
};

/// Throws ParameterError unless m > n, or m == n with constant phi
/// (the dφ⊗dφ term is then dropped).
void require_dimension_parameter(const Manifold& manifold, double m);

CurvatureReport bakry_emery(const ManifoldPtr& manifold, double m);

/// Ric_φ = ∇²φ on a flat model.
SymTensorField weight_hessian(const ManifoldPtr& manifold);

struct BochnerDefect {
  /// ½Δ_φ|∇w|² - |∇²w|² - ∇w·∇Δ_φw - Ric_φ(∇w,∇w); tends to 0 as O(h²).
  ScalarField equality;
  /// ½Δ_φ|∇w|² - (Δ_φw)²/m - ∇w·∇Δ_φw - Ric_φ^m(∇w,∇w); nonnegative in
  /// the continuum.
  ScalarField slack;
};

BochnerDefect bochner_defect(const ScalarField& w, double m);

}  // namespace pmeflow
