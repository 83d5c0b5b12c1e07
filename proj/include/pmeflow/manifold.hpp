#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <vector>

namespace pmeflow {

enum class ManifoldKind { circle, torus2 };

/// How the weight function phi is specified. `sin_first` is
/// amplitude * sin(2 pi x / L_x), which is amplitude * sin(x) on the
/// standard circle of length 2 pi.
enum class WeightKind { zero, constant, sin_first, samples };

struct WeightSpec {
  WeightKind kind = WeightKind::zero;
  double amplitude = 0.0;       // value for `constant`, amplitude for `sin_first`
  std::vector<double> samples;  // one per node for `samples`
};

struct ManifoldSpec {
  ManifoldKind kind = ManifoldKind::circle;
  std::array<double, 2> lengths{2.0 * std::numbers::pi, 2.0 * std::numbers::pi};
  std::array<int, 2> points{128, 128};
  WeightSpec phi;
};

/// A closed flat model manifold (circle or flat 2-torus) sampled on a
/// uniform periodic grid, together with the weight phi and the density
/// e^{-phi} of the weighted measure.
///
/// Nodes are numbered x-fastest: node = ix + points(0) * iy.
class Manifold {
 public:
  /// Validates the spec and samples phi. Throws ParameterError.
  static std::shared_ptr<const Manifold> create(ManifoldSpec spec);

  const ManifoldSpec& spec() const noexcept { return spec_; }
  int dimension() const noexcept { return dim_; }
  std::size_t node_count() const noexcept { return phi_.size(); }
  int points(int axis) const noexcept { return spec_.points[axis]; }
  double length(int axis) const noexcept { return spec_.lengths[axis]; }
  double spacing(int axis) const noexcept { return spacing_[axis]; }
  double min_spacing() const noexcept;
  double cell_volume() const noexcept { return cell_volume_; }

  std::span<const double> phi() const noexcept { return phi_; }
  std::span<const double> weight() const noexcept { return weight_; }
  bool phi_is_constant() const noexcept { return phi_constant_; }

  std::array<double, 2> coordinates(std::size_t node) const noexcept;
  std::size_t index(int ix, int iy = 0) const noexcept {
    return static_cast<std::size_t>(ix) +
           static_cast<std::size_t>(spec_.points[0]) * static_cast<std::size_t>(iy);
  }

  /// Same grid and same phi samples.
  bool same_as(const Manifold& other) const noexcept;

 private:
  explicit Manifold(ManifoldSpec spec);

  ManifoldSpec spec_;
  int dim_ = 1;
  std::array<double, 2> spacing_{};
  double cell_volume_ = 0.0;
  std::vector<double> phi_;
  std::vector<double> weight_;
  bool phi_constant_ = true;
};

using ManifoldPtr = std::shared_ptr<const Manifold>;

}  // namespace pmeflow
