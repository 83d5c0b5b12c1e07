#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "pmeflow/manifold.hpp"

namespace pmeflow {

/// One real value per grid node.
class ScalarField {
 public:
  /// Throws ParameterError on a size mismatch, NumericalError on
  /// non-finite values.
  ScalarField(ManifoldPtr manifold, std::vector<double> values);

  static ScalarField constant(ManifoldPtr manifold, double value);
  static ScalarField sample(ManifoldPtr manifold,
                            const std::function<double(double, double)>& f);

  const Manifold& manifold() const noexcept { return *manifold_; }
  const ManifoldPtr& manifold_ptr() const noexcept { return manifold_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  double min() const noexcept;
  double max() const noexcept;
  double max_abs() const noexcept;

 private:
  ManifoldPtr manifold_;
  std::vector<double> values_;
};

/// n components per node, stored component-major.
class VectorField {
 public:
  VectorField(ManifoldPtr manifold, std::vector<std::vector<double>> components);

  const Manifold& manifold() const noexcept { return *manifold_; }
  int dimension() const noexcept { return static_cast<int>(components_.size()); }
  std::span<const double> component(int axis) const noexcept { return components_[axis]; }

  double dot(std::size_t node, const VectorField& other) const noexcept;
  double norm_squared(std::size_t node) const noexcept { return dot(node, *this); }

 private:
  ManifoldPtr manifold_;
  std::vector<std::vector<double>> components_;
};

/// Symmetric n x n tensor per node; stores the n(n+1)/2 independent
/// entries (xx) or (xx, xy, yy).
class SymTensorField {
 public:
  SymTensorField(ManifoldPtr manifold, std::vector<std::vector<double>> entries);

  const Manifold& manifold() const noexcept { return *manifold_; }
  int dimension() const noexcept { return dim_; }

  double entry(std::size_t node, int row, int col) const noexcept;
  std::span<const double> entries(int row, int col) const noexcept;

  double trace(std::size_t node) const noexcept;
  double frobenius_squared(std::size_t node) const noexcept;
  /// T(X, X) with X the vector of `field` at `node`.
  double quadratic_form(std::size_t node, const VectorField& field) const noexcept;
  double min_eigenvalue(std::size_t node) const noexcept;
  double max_abs() const noexcept;

 private:
  static int slot(int row, int col) noexcept { return row + col; }

  ManifoldPtr manifold_;
  int dim_;
  std::vector<std::vector<double>> entries_;
};

/// Closed-form smallest eigenvalue of [[a, b], [b, c]].
double symmetric_2x2_min_eigenvalue(double a, double b, double c) noexcept;

}  // namespace pmeflow
