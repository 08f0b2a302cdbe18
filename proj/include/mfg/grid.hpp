#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace mfg {

/// Fixed-size small vector. Components beyond the grid dimension are zero.
using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

/// Uniform periodic lattice on the unit torus [0,1)^d, row-major node order
/// with axis 0 varying slowest.
class TorusGrid {
 public:
  TorusGrid(int d, int n);

  int dim() const noexcept { return d_; }
  int points_per_axis() const noexcept { return n_; }
  double spacing() const noexcept { return h_; }
  double cell_volume() const noexcept { return cell_volume_; }
  std::size_t size() const noexcept { return size_; }

  std::size_t stride(int axis) const noexcept { return strides_[axis]; }
  int coord(std::size_t node, int axis) const noexcept {
    return static_cast<int>((node / strides_[axis]) % static_cast<std::size_t>(n_));
  }
  /// Node reached by moving `shift` cells along `axis`, wrapping periodically.
  std::size_t neighbor(std::size_t node, int axis, int shift) const noexcept;
  std::size_t node_at(const std::array<int, 3>& coords) const noexcept;
  Vec3 position(std::size_t node) const noexcept;
  /// Nearest node to a point of the torus (coordinates taken modulo 1).
  std::size_t nearest_node(const Vec3& x) const noexcept;

  bool operator==(const TorusGrid&) const = default;

 private:
  int d_;
  int n_;
  double h_;
  double cell_volume_;
  std::size_t size_;
  std::array<std::size_t, 3> strides_{};
};

class TimeGrid {
 public:
  TimeGrid(double horizon, int steps);

  double horizon() const noexcept { return T_; }
  int steps() const noexcept { return nt_; }
  double dt() const noexcept { return dt_; }
  /// Node nt maps exactly to the horizon.
  double time(int k) const noexcept { return k == nt_ ? T_ : k * dt_; }
  int nearest_node(double t) const noexcept;

  bool operator==(const TimeGrid&) const = default;

 private:
  double T_;
  int nt_;
  double dt_;
};

class ScalarField {
 public:
  explicit ScalarField(const TorusGrid& grid, double fill = 0.0);
  /// Throws if the length is wrong or any value is non-finite.
  ScalarField(const TorusGrid& grid, std::vector<double> values);

  static ScalarField from_function(const TorusGrid& grid,
                                   const std::function<double(const Vec3&)>& f);

  const TorusGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }

  bool operator==(const ScalarField&) const = default;

 private:
  TorusGrid grid_;
  std::vector<double> values_;
};

/// One d-vector per node, stored interleaved (node-major).
class VectorField {
 public:
  explicit VectorField(const TorusGrid& grid, double fill = 0.0);

  const TorusGrid& grid() const noexcept { return grid_; }
  int dim() const noexcept { return grid_.dim(); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  double at(std::size_t node, int axis) const noexcept {
    return values_[node * static_cast<std::size_t>(grid_.dim()) + axis];
  }
  double& at(std::size_t node, int axis) noexcept {
    return values_[node * static_cast<std::size_t>(grid_.dim()) + axis];
  }
  Vec3 vec(std::size_t node) const noexcept;
  void set(std::size_t node, const Vec3& v) noexcept;

 private:
  TorusGrid grid_;
  std::vector<double> values_;
};

// Discrete calculus. All operators are linear and use periodic wrap.

void gradient_central(const ScalarField& f, VectorField& out);
VectorField gradient_central(const ScalarField& f);

void laplacian(const ScalarField& f, ScalarField& out);
ScalarField laplacian(const ScalarField& f);

/// Exact negative transpose of gradient_central under the discrete inner product.
void divergence(const VectorField& v, ScalarField& out);
ScalarField divergence(const VectorField& v);

/// Second-difference Hessian at one node (3-point diagonal, 4-point cross terms).
Mat3 hessian_at(const ScalarField& f, std::size_t node);

// Discrete integrals: <f,g> = h^d sum f g.

double inner(const ScalarField& f, const ScalarField& g);
double inner(const VectorField& v, const VectorField& w);
double mass(const ScalarField& f);
double max_abs(const ScalarField& f);
double min_value(const ScalarField& f);
double max_value(const ScalarField& f);
/// (h^d sum |f|^r)^(1/r), r >= 1.
double lp_norm(const ScalarField& f, double r);
/// Largest Euclidean length of the node vectors.
double max_norm(const VectorField& v);

void require_same_grid(const TorusGrid& a, const TorusGrid& b, const char* where);

}  // namespace mfg
