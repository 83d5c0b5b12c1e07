#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "pmeflow/field.hpp"

namespace pmeflow {

/// Truncated Fourier series on a periodic box,
///   f(x, y) = offset + Σ a_k cos θ_k + b_k sin θ_k,  θ_k = 2π(kx x / Lx + ky y / Ly),
/// with analytic value, gradient and Hessian.
class TrigPolynomial {
 public:
  struct Mode {
    int kx = 0;
    int ky = 0;
    double a = 0.0;
    double b = 0.0;
  };

  TrigPolynomial(int dimension, std::array<double, 2> lengths, double offset,
                 std::vector<Mode> modes);

  /// Seeded random series with |kx|, |ky| <= max_mode and coefficients
  /// uniform in [-1, 1]. If `coefficient_sum` > 0 the coefficients are
  /// rescaled so that Σ(|a_k| + |b_k|) equals it, which bounds the
  /// oscillation: |f - offset| <= coefficient_sum.
  static TrigPolynomial random(int dimension, std::array<double, 2> lengths, int max_mode,
                               std::uint64_t seed, double offset = 0.0,
                               double coefficient_sum = 0.0);

  double value(double x, double y = 0.0) const noexcept;
  std::array<double, 2> gradient(double x, double y = 0.0) const noexcept;
  /// (xx, xy, yy)
  std::array<double, 3> hessian(double x, double y = 0.0) const noexcept;

  ScalarField sample(const ManifoldPtr& manifold) const;

  const std::vector<Mode>& modes() const noexcept { return modes_; }
  double coefficient_sum() const noexcept;

 private:
  double wave_x(const Mode& m) const noexcept;
  double wave_y(const Mode& m) const noexcept;

  int dim_;
  std::array<double, 2> lengths_;
  double offset_;
  std::vector<Mode> modes_;
};

}  // namespace pmeflow
