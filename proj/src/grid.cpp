#include "mfg/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "mfg/error.hpp"

namespace mfg {

TorusGrid::TorusGrid(int d, int n) : d_(d), n_(n) {
  if (d < 1 || d > 3) throw std::invalid_argument("TorusGrid: dimension must be 1, 2 or 3");
  if (n < 4) throw std::invalid_argument("TorusGrid: need at least 4 points per axis");
  h_ = 1.0 / n;
  if (h_ * n != 1.0) {
    throw std::invalid_argument("TorusGrid: n=" + std::to_string(n) +
                                " does not satisfy h*n == 1 in double arithmetic");
  }
  size_ = 1;
  for (int i = 0; i < d; ++i) size_ *= static_cast<std::size_t>(n);
  std::size_t s = 1;
  for (int axis = d - 1; axis >= 0; --axis) {
    strides_[axis] = s;
    s *= static_cast<std::size_t>(n);
  }
  cell_volume_ = std::pow(h_, d);
}

std::size_t TorusGrid::neighbor(std::size_t node, int axis, int shift) const noexcept {
  const int c = coord(node, axis);
  int target = (c + shift) % n_;
  if (target < 0) target += n_;
  return node + (static_cast<std::ptrdiff_t>(target) - c) * static_cast<std::ptrdiff_t>(strides_[axis]);
}

std::size_t TorusGrid::node_at(const std::array<int, 3>& coords) const noexcept {
  std::size_t node = 0;
  for (int axis = 0; axis < d_; ++axis) {
    int c = coords[axis] % n_;
    if (c < 0) c += n_;
    node += static_cast<std::size_t>(c) * strides_[axis];
  }
  return node;
}

Vec3 TorusGrid::position(std::size_t node) const noexcept {
  Vec3 x{0.0, 0.0, 0.0};
  for (int axis = 0; axis < d_; ++axis) x[axis] = coord(node, axis) * h_;
  return x;
}

std::size_t TorusGrid::nearest_node(const Vec3& x) const noexcept {
  std::array<int, 3> c{0, 0, 0};
  for (int axis = 0; axis < d_; ++axis) {
    const double wrapped = x[axis] - std::floor(x[axis]);
    c[axis] = static_cast<int>(std::lround(wrapped * n_)) % n_;
  }
  return node_at(c);
}

TimeGrid::TimeGrid(double horizon, int steps) : T_(horizon), nt_(steps) {
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("TimeGrid: horizon must be positive");
  if (steps < 1) throw std::invalid_argument("TimeGrid: need at least one step");
  dt_ = T_ / nt_;
}

int TimeGrid::nearest_node(double t) const noexcept {
  const long k = std::lround(t / dt_);
  return static_cast<int>(std::clamp<long>(k, 0, nt_));
}

ScalarField::ScalarField(const TorusGrid& grid, double fill)
    : grid_(grid), values_(grid.size(), fill) {}

ScalarField::ScalarField(const TorusGrid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw std::invalid_argument("ScalarField: expected " + std::to_string(grid_.size()) +
                                " values, got " + std::to_string(values_.size()));
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]))
      throw std::invalid_argument("ScalarField: non-finite value at node " + std::to_string(i));
  }
}

ScalarField ScalarField::from_function(const TorusGrid& grid,
                                       const std::function<double(const Vec3&)>& f) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid.position(i));
  return ScalarField(grid, std::move(v));
}

VectorField::VectorField(const TorusGrid& grid, double fill)
    : grid_(grid), values_(grid.size() * static_cast<std::size_t>(grid.dim()), fill) {}

Vec3 VectorField::vec(std::size_t node) const noexcept {
  Vec3 v{0.0, 0.0, 0.0};
  for (int i = 0; i < grid_.dim(); ++i) v[i] = at(node, i);
  return v;
}

void VectorField::set(std::size_t node, const Vec3& v) noexcept {
  for (int i = 0; i < grid_.dim(); ++i) at(node, i) = v[i];
}

void require_same_grid(const TorusGrid& a, const TorusGrid& b, const char* where) {
  if (!(a == b)) throw GridMismatchError(std::string(where) + ": fields live on different grids");
}

void gradient_central(const ScalarField& f, VectorField& out) {
  const TorusGrid& g = f.grid();
  require_same_grid(g, out.grid(), "gradient_central");
  const double inv2h = 0.5 / g.spacing();
  for (std::size_t x = 0; x < g.size(); ++x) {
    for (int i = 0; i < g.dim(); ++i) {
      out.at(x, i) = (f[g.neighbor(x, i, 1)] - f[g.neighbor(x, i, -1)]) * inv2h;
    }
  }
}

VectorField gradient_central(const ScalarField& f) {
  VectorField out(f.grid());
  gradient_central(f, out);
  return out;
}

void laplacian(const ScalarField& f, ScalarField& out) {
  const TorusGrid& g = f.grid();
  require_same_grid(g, out.grid(), "laplacian");
  const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
  for (std::size_t x = 0; x < g.size(); ++x) {
    double acc = 0.0;
    for (int i = 0; i < g.dim(); ++i) {
      acc += f[g.neighbor(x, i, 1)] - 2.0 * f[x] + f[g.neighbor(x, i, -1)];
    }
    out[x] = acc * inv_h2;
  }
}

ScalarField laplacian(const ScalarField& f) {
  ScalarField out(f.grid());
  laplacian(f, out);
  return out;
}

void divergence(const VectorField& v, ScalarField& out) {
  const TorusGrid& g = v.grid();
  require_same_grid(g, out.grid(), "divergence");
  const double inv2h = 0.5 / g.spacing();
  for (std::size_t x = 0; x < g.size(); ++x) {
    double acc = 0.0;
    for (int i = 0; i < g.dim(); ++i) {
      acc += v.at(g.neighbor(x, i, 1), i) - v.at(g.neighbor(x, i, -1), i);
    }
    out[x] = acc * inv2h;
  }
}

ScalarField divergence(const VectorField& v) {
  ScalarField out(v.grid());
  divergence(v, out);
  return out;
}

Mat3 hessian_at(const ScalarField& f, std::size_t node) {
  const TorusGrid& g = f.grid();
  const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
  Mat3 hess{};
  for (int i = 0; i < g.dim(); ++i) {
    hess[i][i] = (f[g.neighbor(node, i, 1)] - 2.0 * f[node] + f[g.neighbor(node, i, -1)]) * inv_h2;
    for (int j = i + 1; j < g.dim(); ++j) {
      const std::size_t ip = g.neighbor(node, i, 1);
      const std::size_t im = g.neighbor(node, i, -1);
      const double cross = f[g.neighbor(ip, j, 1)] - f[g.neighbor(ip, j, -1)] -
                           f[g.neighbor(im, j, 1)] + f[g.neighbor(im, j, -1)];
      hess[i][j] = hess[j][i] = 0.25 * cross * inv_h2;
    }
  }
  return hess;
}

double inner(const ScalarField& f, const ScalarField& g) {
  require_same_grid(f.grid(), g.grid(), "inner");
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) acc += f[i] * g[i];
  return acc * f.grid().cell_volume();
}

double inner(const VectorField& v, const VectorField& w) {
  require_same_grid(v.grid(), w.grid(), "inner");
  double acc = 0.0;
  const auto a = v.values();
  const auto b = w.values();
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc * v.grid().cell_volume();
}

double mass(const ScalarField& f) {
  double acc = 0.0;
  for (double v : f.values()) acc += v;
  return acc * f.grid().cell_volume();
}

double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

double min_value(const ScalarField& f) {
  return *std::min_element(f.values().begin(), f.values().end());
}

double max_value(const ScalarField& f) {
  return *std::max_element(f.values().begin(), f.values().end());
}

double lp_norm(const ScalarField& f, double r) {
  if (!(r >= 1.0)) throw std::invalid_argument("lp_norm: exponent must be >= 1");
  if (std::isinf(r)) return max_abs(f);
  double acc = 0.0;
  for (double v : f.values()) acc += std::pow(std::abs(v), r);
  return std::pow(acc * f.grid().cell_volume(), 1.0 / r);
}

double max_norm(const VectorField& v) {
  double m = 0.0;
  for (std::size_t x = 0; x < v.grid().size(); ++x) {
    double s = 0.0;
    for (int i = 0; i < v.dim(); ++i) s += v.at(x, i) * v.at(x, i);
    m = std::max(m, s);
  }
  return std::sqrt(m);
}

}  // namespace mfg
