#include "pmeflow/trig.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "pmeflow/error.hpp"

namespace pmeflow {

TrigPolynomial::TrigPolynomial(int dimension, std::array<double, 2> lengths, double offset,
                               std::vector<Mode> modes)
    : dim_(dimension), lengths_(lengths), offset_(offset), modes_(std::move(modes)) {
  if (dim_ != 1 && dim_ != 2) throw ParameterError("trig polynomial dimension must be 1 or 2");
  if (dim_ == 1)
    for (const auto& m : modes_)
      if (m.ky != 0) throw ParameterError("1-d trig polynomial cannot have y modes");
}

TrigPolynomial TrigPolynomial::random(int dimension, std::array<double, 2> lengths,
                                      int max_mode, std::uint64_t seed, double offset,
                                      double coefficient_sum) {
  if (max_mode < 1) throw ParameterError("max_mode must be at least 1");
  std::mt19937_64 rng(seed);
  // Draw from raw 53-bit mantissas so the stream is identical across
  // standard library implementations.
  auto uniform = [&rng]() {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
  };

  std::vector<Mode> modes;
  if (dimension == 1) {
    for (int k = 1; k <= max_mode; ++k) modes.push_back({k, 0, uniform(), uniform()});
  } else {
    // Half-plane of wave vectors, excluding the zero mode.
    for (int kx = 0; kx <= max_mode; ++kx)
      for (int ky = -max_mode; ky <= max_mode; ++ky) {
        if (kx == 0 && ky <= 0) continue;
        modes.push_back({kx, ky, uniform(), uniform()});
      }
  }
  TrigPolynomial poly(dimension, lengths, offset, std::move(modes));
  if (coefficient_sum > 0.0) {
    const double scale = coefficient_sum / poly.coefficient_sum();
    for (auto& m : poly.modes_) {
      m.a *= scale;
      m.b *= scale;
    }
  }
  return poly;
}

double TrigPolynomial::wave_x(const Mode& m) const noexcept {
  return 2.0 * std::numbers::pi * m.kx / lengths_[0];
}

double TrigPolynomial::wave_y(const Mode& m) const noexcept {
  return dim_ == 1 ? 0.0 : 2.0 * std::numbers::pi * m.ky / lengths_[1];
}

double TrigPolynomial::value(double x, double y) const noexcept {
  double s = offset_;
  for (const auto& m : modes_) {
    const double th = wave_x(m) * x + wave_y(m) * y;
    s += m.a * std::cos(th) + m.b * std::sin(th);
  }
  return s;
}

std::array<double, 2> TrigPolynomial::gradient(double x, double y) const noexcept {
  std::array<double, 2> g{0.0, 0.0};
  for (const auto& m : modes_) {
    const double wx = wave_x(m), wy = wave_y(m);
    const double th = wx * x + wy * y;
    const double d = -m.a * std::sin(th) + m.b * std::cos(th);
    g[0] += wx * d;
    g[1] += wy * d;
  }
  return g;
}

std::array<double, 3> TrigPolynomial::hessian(double x, double y) const noexcept {
  std::array<double, 3> h{0.0, 0.0, 0.0};
  for (const auto& m : modes_) {
    const double wx = wave_x(m), wy = wave_y(m);
    const double th = wx * x + wy * y;
    const double d2 = -(m.a * std::cos(th) + m.b * std::sin(th));
    h[0] += wx * wx * d2;
    h[1] += wx * wy * d2;
    h[2] += wy * wy * d2;
  }
  return h;
}

ScalarField TrigPolynomial::sample(const ManifoldPtr& manifold) const {
  if (manifold->dimension() != dim_)
    throw ParameterError("trig polynomial dimension does not match manifold");
  if (manifold->length(0) != lengths_[0] || (dim_ == 2 && manifold->length(1) != lengths_[1]))
    throw ParameterError("trig polynomial period does not match manifold");
  return ScalarField::sample(manifold, [this](double x, double y) { return value(x, y); });
}

double TrigPolynomial::coefficient_sum() const noexcept {
  double s = 0.0;
  for (const auto& m : modes_) s += std::abs(m.a) + std::abs(m.b);
  return s;
}

}  // namespace pmeflow
