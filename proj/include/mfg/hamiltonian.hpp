#pragma once

#include <array>
#include <string>
#include <vector>

#include "mfg/error.hpp"
#include "mfg/grid.hpp"

namespace mfg {

struct TrigMode {
  std::array<int, 3> k{0, 0, 0};
  double cos_coeff = 0.0;
  double sin_coeff = 0.0;
  bool operator==(const TrigMode&) const = default;
};

/// c + sum_j (A_j cos(2 pi k_j.x) + B_j sin(2 pi k_j.x)); smooth and periodic,
/// with exact derivatives.
struct TrigPolynomial {
  double constant = 0.0;
  std::vector<TrigMode> modes;

  double value(const Vec3& x) const;
  Vec3 gradient(const Vec3& x) const;
  Mat3 hessian(const Vec3& x) const;
  ScalarField sample(const TorusGrid& grid) const;
  /// Minimum over a dense lattice of the torus.
  double approximate_min(int d) const;

  bool operator==(const TrigPolynomial&) const = default;
};

class ModelError : public Error {
 public:
  using Error::Error;
};

/// Coefficients and their spatial derivatives at one point.
struct PointData {
  double a = 0.0;
  double V = 0.0;
  Vec3 grad_a{};
  Vec3 grad_V{};
  Mat3 hess_a{};
  Mat3 hess_V{};
};

/// H(x,p) = a(x) (1+|p|^2)^((2+mu)/2) + V(x).
class HamiltonianModel {
 public:
  /// No validation; used by the assumption checker and degenerate test setups.
  HamiltonianModel(int d, TrigPolynomial a, TrigPolynomial V, double mu);

  /// Enforces min a > 0, min V > 0, min a + min V >= 1 and 0 <= mu < 1.
  static HamiltonianModel validated(int d, TrigPolynomial a, TrigPolynomial V, double mu);
  /// Human-readable list of violated construction requirements.
  std::vector<std::string> problems() const;

  int dim() const noexcept { return d_; }
  double mu() const noexcept { return mu_; }
  const TrigPolynomial& a() const noexcept { return a_; }
  const TrigPolynomial& V() const noexcept { return V_; }

  PointData at(const Vec3& x) const;

  // Closed forms in terms of local coefficient values.
  double H(double a, double V, const Vec3& p) const;
  Vec3 DpH(double a, const Vec3& p) const;
  Mat3 DppH(double a, const Vec3& p) const;
  double Lhat(double a, double V, const Vec3& p) const;
  Vec3 DxH(const PointData& c, const Vec3& p) const;
  Mat3 DxxH(const PointData& c, const Vec3& p) const;
  /// Entry [i][j] is the mixed derivative d_{x_i} d_{p_j} H.
  Mat3 DxpH(const PointData& c, const Vec3& p) const;
  /// sup_p (-p.v - H); radial reduction plus bracketed root of the
  /// first-order condition on [0, p_max].
  double L(double a, double V, const Vec3& v, double p_max) const;

  bool operator==(const HamiltonianModel&) const = default;

 private:
  int d_;
  TrigPolynomial a_;
  TrigPolynomial V_;
  double mu_;
};

inline constexpr double default_legendre_pmax = 100.0;

double eval_H(const HamiltonianModel& model, const Vec3& x, const Vec3& p);
Vec3 eval_DpH(const HamiltonianModel& model, const Vec3& x, const Vec3& p);
double eval_Lhat(const HamiltonianModel& model, const Vec3& x, const Vec3& p);
double eval_L(const HamiltonianModel& model, const Vec3& x, const Vec3& v,
              double p_max = default_legendre_pmax);

/// a and V sampled at the nodes of a grid.
struct NodalCoefficients {
  ScalarField a;
  ScalarField V;
};
NodalCoefficients sample_coefficients(const HamiltonianModel& model, const TorusGrid& grid);

inline double dot(const Vec3& u, const Vec3& v, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) s += u[i] * v[i];
  return s;
}

}  // namespace mfg
