#include "pmeflow/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pmeflow/error.hpp"

namespace pmeflow {

std::shared_ptr<const Manifold> Manifold::create(ManifoldSpec spec) {
  return std::shared_ptr<const Manifold>(new Manifold(std::move(spec)));
}

Manifold::Manifold(ManifoldSpec spec) : spec_(std::move(spec)) {
  dim_ = spec_.kind == ManifoldKind::circle ? 1 : 2;
  if (dim_ == 1) {
    spec_.lengths[1] = 1.0;
    spec_.points[1] = 1;
  }
  for (int a = 0; a < dim_; ++a) {
    if (!(spec_.lengths[a] > 0.0) || !std::isfinite(spec_.lengths[a]))
      throw ParameterError("manifold length must be positive and finite");
    if (spec_.points[a] < 8)
      throw ParameterError("manifold grid needs at least 8 points per axis");
    spacing_[a] = spec_.lengths[a] / spec_.points[a];
  }
  cell_volume_ = dim_ == 1 ? spacing_[0] : spacing_[0] * spacing_[1];

  const std::size_t n = static_cast<std::size_t>(spec_.points[0]) *
                        static_cast<std::size_t>(spec_.points[1]);
  phi_.assign(n, 0.0);
  switch (spec_.phi.kind) {
    case WeightKind::zero:
      break;
    case WeightKind::constant:
      std::fill(phi_.begin(), phi_.end(), spec_.phi.amplitude);
      break;
    case WeightKind::sin_first:
      for (std::size_t i = 0; i < n; ++i) {
        const double x = coordinates(i)[0];
        phi_[i] = spec_.phi.amplitude *
                  std::sin(2.0 * std::numbers::pi * x / spec_.lengths[0]);
      }
      break;
    case WeightKind::samples:
      if (spec_.phi.samples.size() != n)
        throw ParameterError("phi samples: expected " + std::to_string(n) +
                             " values, got " +
                             std::to_string(spec_.phi.samples.size()));
      phi_ = spec_.phi.samples;
      break;
  }
  weight_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(phi_[i])) throw ParameterError("phi samples must be finite");
    weight_[i] = std::exp(-phi_[i]);
  }
  phi_constant_ = std::all_of(phi_.begin(), phi_.end(),
                              [&](double v) { return v == phi_.front(); });
}

double Manifold::min_spacing() const noexcept {
  return dim_ == 1 ? spacing_[0] : std::min(spacing_[0], spacing_[1]);
}

std::array<double, 2> Manifold::coordinates(std::size_t node) const noexcept {
  const auto nx = static_cast<std::size_t>(spec_.points[0]);
  return {static_cast<double>(node % nx) * spacing_[0],
          static_cast<double>(node / nx) * spacing_[1]};
}

bool Manifold::same_as(const Manifold& other) const noexcept {
  if (this == &other) return true;
  return spec_.kind == other.spec_.kind && spec_.points == other.spec_.points &&
         spec_.lengths == other.spec_.lengths && phi_ == other.phi_;
}

}  // namespace pmeflow
