#include "pmeflow/operators.hpp"

#include <cmath>

#include "pmeflow/error.hpp"

namespace pmeflow {

namespace {

void require_same(const ScalarField& a, const ScalarField& b) {
  if (!a.manifold().same_as(b.manifold()))
    throw ParameterError("fields live on different manifolds");
}

}  // namespace

void centered_difference(const Manifold& manifold, int axis, std::span<const double> f,
                         std::span<double> out) {
  const int nx = manifold.points(0);
  const int ny = manifold.points(1);
  const double inv = 1.0 / (2.0 * manifold.spacing(axis));
  if (axis == 0) {
    for (int iy = 0; iy < ny; ++iy) {
      const double* row = f.data() + static_cast<std::size_t>(iy) * nx;
      double* o = out.data() + static_cast<std::size_t>(iy) * nx;
      o[0] = (row[1] - row[nx - 1]) * inv;
      for (int ix = 1; ix < nx - 1; ++ix) o[ix] = (row[ix + 1] - row[ix - 1]) * inv;
      o[nx - 1] = (row[0] - row[nx - 2]) * inv;
    }
  } else {
    for (int iy = 0; iy < ny; ++iy) {
      const std::size_t up = static_cast<std::size_t>((iy + 1) % ny) * nx;
      const std::size_t down = static_cast<std::size_t>((iy + ny - 1) % ny) * nx;
      const std::size_t here = static_cast<std::size_t>(iy) * nx;
      for (int ix = 0; ix < nx; ++ix) out[here + ix] = (f[up + ix] - f[down + ix]) * inv;
    }
  }
}

VectorField gradient(const ScalarField& f) {
  const Manifold& m = f.manifold();
  std::vector<std::vector<double>> comps(m.dimension(), std::vector<double>(m.node_count()));
  for (int a = 0; a < m.dimension(); ++a) centered_difference(m, a, f.values(), comps[a]);
  return VectorField(f.manifold_ptr(), std::move(comps));
}

SymTensorField hessian(const ScalarField& f) {
  const Manifold& m = f.manifold();
  const int nx = m.points(0);
  const int ny = m.points(1);
  const auto v = f.values();
  const std::size_t n = m.node_count();
  const double hx2 = m.spacing(0) * m.spacing(0);
  auto at = [&](int ix, int iy) {
    ix = (ix + nx) % nx;
    iy = (iy + ny) % ny;
    return v[m.index(ix, iy)];
  };

  if (m.dimension() == 1) {
    std::vector<double> xx(n);
    for (int ix = 0; ix < nx; ++ix)
      xx[ix] = (at(ix + 1, 0) - 2.0 * v[ix] + at(ix - 1, 0)) / hx2;
    return SymTensorField(f.manifold_ptr(), {std::move(xx)});
  }

  const double hy2 = m.spacing(1) * m.spacing(1);
  const double hxy4 = 4.0 * m.spacing(0) * m.spacing(1);
  std::vector<double> xx(n), xy(n), yy(n);
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const std::size_t i = m.index(ix, iy);
      xx[i] = (at(ix + 1, iy) - 2.0 * v[i] + at(ix - 1, iy)) / hx2;
      yy[i] = (at(ix, iy + 1) - 2.0 * v[i] + at(ix, iy - 1)) / hy2;
      xy[i] = (at(ix + 1, iy + 1) - at(ix + 1, iy - 1) - at(ix - 1, iy + 1) +
               at(ix - 1, iy - 1)) /
              hxy4;
    }
  }
  return SymTensorField(f.manifold_ptr(), {std::move(xx), std::move(xy), std::move(yy)});
}

WittenLaplacian::WittenLaplacian(ManifoldPtr manifold)
    : manifold_(std::move(manifold)),
      flux_(manifold_->node_count()),
      divergence_(manifold_->node_count()) {}

void WittenLaplacian::apply(std::span<const double> f, std::span<double> out) {
  const Manifold& m = *manifold_;
  const auto w = m.weight();
  const std::size_t n = m.node_count();
  for (std::size_t i = 0; i < n; ++i) out[i] = 0.0;
  for (int a = 0; a < m.dimension(); ++a) {
    centered_difference(m, a, f, flux_);
    for (std::size_t i = 0; i < n; ++i) flux_[i] *= w[i];
    centered_difference(m, a, flux_, divergence_);
    for (std::size_t i = 0; i < n; ++i) out[i] += divergence_[i];
  }
  for (std::size_t i = 0; i < n; ++i) out[i] /= w[i];
}

ScalarField witten_laplacian(const ScalarField& f) {
  WittenLaplacian op(f.manifold_ptr());
  std::vector<double> out(f.size());
  op.apply(f.values(), out);
  return ScalarField(f.manifold_ptr(), std::move(out));
}

double weighted_integral(const Manifold& manifold, std::span<const double> f) {
  const auto w = manifold.weight();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * w[i];
  return s * manifold.cell_volume();
}

double weighted_integral(const ScalarField& f) {
  return weighted_integral(f.manifold(), f.values());
}

double symmetry_defect(const ScalarField& u, const ScalarField& v) {
  require_same(u, v);
  const ScalarField lu = witten_laplacian(u);
  const ScalarField lv = witten_laplacian(v);
  const auto w = u.manifold().weight();
  double a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    a += u[i] * lv[i] * w[i];
    b += v[i] * lu[i] * w[i];
  }
  return std::abs(a - b) * u.manifold().cell_volume();
}

}  // namespace pmeflow
