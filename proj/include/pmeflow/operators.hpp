#pragma once

#include <span>
#include <vector>

#include "pmeflow/field.hpp"

namespace pmeflow {

// Discrete differential operators on the periodic grid.
//
// D_a is the centered first difference along axis a. The weighted Laplacian
// is assembled in divergence form, Δ_φ f = e^{φ} Σ_a D_a(e^{-φ} D_a f).
// Since D_a is skew-adjoint on the periodic grid, this makes
//   Σ u (Δ_φ v) e^{-φ} = -Σ (∇u·∇v) e^{-φ} = Σ v (Δ_φ u) e^{-φ}
// and Σ (Δ_φ f) e^{-φ} = 0 hold up to round-off, and Δ_φ(const) = 0 exactly.
// The Hessian uses the compact 3-point second difference on the diagonal and
// the 4-point cross difference off it, so it is not D∘D; this is the dominant
// O(h²) error in the Bochner checks.

VectorField gradient(const ScalarField& f);
SymTensorField hessian(const ScalarField& f);
ScalarField witten_laplacian(const ScalarField& f);

/// ∫ f dμ with dμ = e^{-φ} dv, midpoint rule on the periodic grid.
double weighted_integral(const ScalarField& f);
double weighted_integral(const Manifold& manifold, std::span<const double> f);

/// |∫ u Δ_φ v dμ - ∫ v Δ_φ u dμ|. Throws ParameterError on mismatched manifolds.
double symmetry_defect(const ScalarField& u, const ScalarField& v);

/// out = D_axis f.
void centered_difference(const Manifold& manifold, int axis, std::span<const double> f,
                         std::span<double> out);

/// Reusable Δ_φ with preallocated scratch; one instance per thread.
class WittenLaplacian {
 public:
  explicit WittenLaplacian(ManifoldPtr manifold);

  void apply(std::span<const double> f, std::span<double> out);
  const Manifold& manifold() const noexcept { return *manifold_; }

 private:
  ManifoldPtr manifold_;
  std::vector<double> flux_;
  std::vector<double> divergence_;
};

}  // namespace pmeflow
