#include "pmeflow/field.hpp"

#include <algorithm>
#include <cmath>

#include "pmeflow/error.hpp"

namespace pmeflow {

namespace {

void require_finite(std::span<const double> values, const char* what) {
  for (double v : values)
    if (!std::isfinite(v)) throw NumericalError(std::string(what) + " has non-finite entries");
}

}  // namespace

ScalarField::ScalarField(ManifoldPtr manifold, std::vector<double> values)
    : manifold_(std::move(manifold)), values_(std::move(values)) {
  if (!manifold_) throw ParameterError("field needs a manifold");
  if (values_.size() != manifold_->node_count())
    throw ParameterError("scalar field size does not match node count");
  require_finite(values_, "scalar field");
}

ScalarField ScalarField::constant(ManifoldPtr manifold, double value) {
  const std::size_t n = manifold->node_count();
  return ScalarField(std::move(manifold), std::vector<double>(n, value));
}

ScalarField ScalarField::sample(ManifoldPtr manifold,
                                const std::function<double(double, double)>& f) {
  std::vector<double> v(manifold->node_count());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto xy = manifold->coordinates(i);
    v[i] = f(xy[0], xy[1]);
  }
  return ScalarField(std::move(manifold), std::move(v));
}

double ScalarField::min() const noexcept {
  return *std::min_element(values_.begin(), values_.end());
}

double ScalarField::max() const noexcept {
  return *std::max_element(values_.begin(), values_.end());
}

double ScalarField::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

VectorField::VectorField(ManifoldPtr manifold, std::vector<std::vector<double>> components)
    : manifold_(std::move(manifold)), components_(std::move(components)) {
  if (static_cast<int>(components_.size()) != manifold_->dimension())
    throw ParameterError("vector field needs one component per axis");
  for (const auto& c : components_) {
    if (c.size() != manifold_->node_count())
      throw ParameterError("vector field component size does not match node count");
    require_finite(c, "vector field");
  }
}

double VectorField::dot(std::size_t node, const VectorField& other) const noexcept {
  double s = 0.0;
  for (std::size_t a = 0; a < components_.size(); ++a)
    s += components_[a][node] * other.components_[a][node];
  return s;
}

SymTensorField::SymTensorField(ManifoldPtr manifold, std::vector<std::vector<double>> entries)
    : manifold_(std::move(manifold)), dim_(manifold_->dimension()), entries_(std::move(entries)) {
  const std::size_t expected = dim_ == 1 ? 1 : 3;
  if (entries_.size() != expected)
    throw ParameterError("symmetric tensor field needs n(n+1)/2 entries per node");
  for (const auto& c : entries_) {
    if (c.size() != manifold_->node_count())
      throw ParameterError("tensor entry size does not match node count");
    require_finite(c, "tensor field");
  }
}

double SymTensorField::entry(std::size_t node, int row, int col) const noexcept {
  return entries_[slot(row, col)][node];
}

std::span<const double> SymTensorField::entries(int row, int col) const noexcept {
  return entries_[slot(row, col)];
}

double SymTensorField::trace(std::size_t node) const noexcept {
  return dim_ == 1 ? entries_[0][node] : entries_[0][node] + entries_[2][node];
}

double SymTensorField::frobenius_squared(std::size_t node) const noexcept {
  if (dim_ == 1) return entries_[0][node] * entries_[0][node];
  const double a = entries_[0][node], b = entries_[1][node], c = entries_[2][node];
  return a * a + 2.0 * b * b + c * c;
}

double SymTensorField::quadratic_form(std::size_t node, const VectorField& field) const noexcept {
  const double x = field.component(0)[node];
  if (dim_ == 1) return entries_[0][node] * x * x;
  const double y = field.component(1)[node];
  return entries_[0][node] * x * x + 2.0 * entries_[1][node] * x * y +
         entries_[2][node] * y * y;
}

double SymTensorField::min_eigenvalue(std::size_t node) const noexcept {
  if (dim_ == 1) return entries_[0][node];
  return symmetric_2x2_min_eigenvalue(entries_[0][node], entries_[1][node], entries_[2][node]);
}

double SymTensorField::max_abs() const noexcept {
  double m = 0.0;
  for (const auto& c : entries_)
    for (double v : c) m = std::max(m, std::abs(v));
  return m;
}

double symmetric_2x2_min_eigenvalue(double a, double b, double c) noexcept {
  return 0.5 * (a + c) - std::hypot(0.5 * (a - c), b);
}

}  // namespace pmeflow
