#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "mfg/grid.hpp"
#include "mfg/hamiltonian.hpp"

namespace testing {

inline constexpr double pi = std::numbers::pi;

inline mfg::ScalarField random_field(const mfg::TorusGrid& g, std::mt19937_64& rng,
                                     double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  mfg::ScalarField f(g);
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = u(rng);
  return f;
}

inline mfg::VectorField random_vector_field(const mfg::TorusGrid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  mfg::VectorField v(g);
  for (double& x : v.values()) x = u(rng);
  return v;
}

inline double max_diff(const mfg::ScalarField& a, const mfg::ScalarField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline mfg::TrigPolynomial constant_poly(double c) { return {c, {}}; }

// c + A cos(2 pi k x_axis) + B sin(2 pi k x_axis)
inline mfg::TrigPolynomial mode_poly(double c, int k, double A, double B, int axis = 0) {
  mfg::TrigMode m;
  m.k[static_cast<std::size_t>(axis)] = k;
  m.cos_coeff = A;
  m.sin_coeff = B;
  return {c, {m}};
}

// Density of unit mass from a positive field.
inline mfg::ScalarField normalized(mfg::ScalarField f) {
  const double s = mfg::mass(f);
  for (double& v : f.values()) v /= s;
  return f;
}

}  // namespace testing
