#include "mfg/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace mfg {
namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double phase(const TrigMode& m, const Vec3& x) {
  return two_pi * (m.k[0] * x[0] + m.k[1] * x[1] + m.k[2] * x[2]);
}

}  // namespace

double TrigPolynomial::value(const Vec3& x) const {
  double v = constant;
  for (const auto& m : modes) {
    const double t = phase(m, x);
    v += m.cos_coeff * std::cos(t) + m.sin_coeff * std::sin(t);
  }
  return v;
}

Vec3 TrigPolynomial::gradient(const Vec3& x) const {
  Vec3 g{0.0, 0.0, 0.0};
  for (const auto& m : modes) {
    const double t = phase(m, x);
    const double s = two_pi * (-m.cos_coeff * std::sin(t) + m.sin_coeff * std::cos(t));
    for (int i = 0; i < 3; ++i) g[i] += s * m.k[i];
  }
  return g;
}

Mat3 TrigPolynomial::hessian(const Vec3& x) const {
  Mat3 h{};
  for (const auto& m : modes) {
    const double t = phase(m, x);
    const double s = -two_pi * two_pi * (m.cos_coeff * std::cos(t) + m.sin_coeff * std::sin(t));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) h[i][j] += s * m.k[i] * m.k[j];
  }
  return h;
}

ScalarField TrigPolynomial::sample(const TorusGrid& grid) const {
  return ScalarField::from_function(grid, [this](const Vec3& x) { return value(x); });
}

double TrigPolynomial::approximate_min(int d) const {
  if (modes.empty()) return constant;
  const int n = d == 1 ? 4096 : (d == 2 ? 128 : 32);
  return min_value(sample(TorusGrid(d, n)));
}

HamiltonianModel::HamiltonianModel(int d, TrigPolynomial a, TrigPolynomial V, double mu)
    : d_(d), a_(std::move(a)), V_(std::move(V)), mu_(mu) {
  if (d < 1 || d > 3) throw ModelError("HamiltonianModel: dimension must be 1, 2 or 3");
  if (!std::isfinite(mu)) throw ModelError("HamiltonianModel: mu must be finite");
}

std::vector<std::string> HamiltonianModel::problems() const {
  std::vector<std::string> out;
  const double amin = a_.approximate_min(d_);
  const double vmin = V_.approximate_min(d_);
  auto fmt = [](const char* what, double v) {
    std::ostringstream os;
    os << what << " (got " << v << ")";
    return os.str();
  };
  if (!(amin > 0.0)) out.push_back(fmt("min a must be positive", amin));
  if (!(vmin > 0.0)) out.push_back(fmt("min V must be positive", vmin));
  if (!(amin + vmin >= 1.0)) out.push_back(fmt("min a + min V must be at least 1", amin + vmin));
  if (!(mu_ >= 0.0 && mu_ < 1.0)) out.push_back(fmt("mu must lie in [0, 1)", mu_));
  return out;
}

HamiltonianModel HamiltonianModel::validated(int d, TrigPolynomial a, TrigPolynomial V,
                                             double mu) {
  HamiltonianModel model(d, std::move(a), std::move(V), mu);
  const auto issues = model.problems();
  if (!issues.empty()) {
    std::string msg = "invalid Hamiltonian model:";
    for (const auto& s : issues) msg += " " + s + ";";
    throw ModelError(msg);
  }
  return model;
}

PointData HamiltonianModel::at(const Vec3& x) const {
  PointData c;
  c.a = a_.value(x);
  c.V = V_.value(x);
  c.grad_a = a_.gradient(x);
  c.grad_V = V_.gradient(x);
  c.hess_a = a_.hessian(x);
  c.hess_V = V_.hessian(x);
  return c;
}

double HamiltonianModel::H(double a, double V, const Vec3& p) const {
  const double s = 1.0 + dot(p, p, d_);
  return a * std::pow(s, 0.5 * (2.0 + mu_)) + V;
}

Vec3 HamiltonianModel::DpH(double a, const Vec3& p) const {
  const double s = 1.0 + dot(p, p, d_);
  const double f = a * (2.0 + mu_) * std::pow(s, 0.5 * mu_);
  Vec3 out{0.0, 0.0, 0.0};
  for (int i = 0; i < d_; ++i) out[i] = f * p[i];
  return out;
}

Mat3 HamiltonianModel::DppH(double a, const Vec3& p) const {
  const double s = 1.0 + dot(p, p, d_);
  const double f = a * (2.0 + mu_) * std::pow(s, 0.5 * mu_);
  Mat3 out{};
  for (int i = 0; i < d_; ++i) {
    for (int j = 0; j < d_; ++j) out[i][j] = f * ((i == j ? 1.0 : 0.0) + mu_ * p[i] * p[j] / s);
  }
  return out;
}

double HamiltonianModel::Lhat(double a, double V, const Vec3& p) const {
  const double p2 = dot(p, p, d_);
  const double s = 1.0 + p2;
  return a * ((2.0 + mu_) * p2 * std::pow(s, 0.5 * mu_) - std::pow(s, 0.5 * (2.0 + mu_))) - V;
}

Vec3 HamiltonianModel::DxH(const PointData& c, const Vec3& p) const {
  const double sq = std::pow(1.0 + dot(p, p, d_), 0.5 * (2.0 + mu_));
  Vec3 out{0.0, 0.0, 0.0};
  for (int i = 0; i < d_; ++i) out[i] = sq * c.grad_a[i] + c.grad_V[i];
  return out;
}

Mat3 HamiltonianModel::DxxH(const PointData& c, const Vec3& p) const {
  const double sq = std::pow(1.0 + dot(p, p, d_), 0.5 * (2.0 + mu_));
  Mat3 out{};
  for (int i = 0; i < d_; ++i)
    for (int j = 0; j < d_; ++j) out[i][j] = sq * c.hess_a[i][j] + c.hess_V[i][j];
  return out;
}

Mat3 HamiltonianModel::DxpH(const PointData& c, const Vec3& p) const {
  const double f = (2.0 + mu_) * std::pow(1.0 + dot(p, p, d_), 0.5 * mu_);
  Mat3 out{};
  for (int i = 0; i < d_; ++i)
    for (int j = 0; j < d_; ++j) out[i][j] = c.grad_a[i] * f * p[j];
  return out;
}

double HamiltonianModel::L(double a, double V, const Vec3& v, double p_max) const {
  if (!(a > 0.0)) throw ModelError("eval_L: the Legendre transform needs a(x) > 0");
  const double speed = std::sqrt(dot(v, v, d_));
  // Along p = -t v/|v| the objective is t|v| - a(1+t^2)^q - V, concave in t.
  auto slope = [&](double t) {
    return speed - a * (2.0 + mu_) * std::pow(1.0 + t * t, 0.5 * mu_) * t;
  };
  double lo = 0.0;
  double hi = p_max;
  if (speed > 0.0) {
    if (slope(hi) > 0.0) {
      std::ostringstream os;
      os << "eval_L: maximizer lies beyond |p| = " << p_max << " for |v| = " << speed
         << "; increase p_max";
      throw ModelError(os.str());
    }
    for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      (slope(mid) > 0.0 ? lo : hi) = mid;
    }
  } else {
    hi = 0.0;
  }
  const double t = 0.5 * (lo + hi);
  return t * speed - a * std::pow(1.0 + t * t, 0.5 * (2.0 + mu_)) - V;
}

double eval_H(const HamiltonianModel& model, const Vec3& x, const Vec3& p) {
  return model.H(model.a().value(x), model.V().value(x), p);
}

Vec3 eval_DpH(const HamiltonianModel& model, const Vec3& x, const Vec3& p) {
  return model.DpH(model.a().value(x), p);
}

double eval_Lhat(const HamiltonianModel& model, const Vec3& x, const Vec3& p) {
  return model.Lhat(model.a().value(x), model.V().value(x), p);
}

double eval_L(const HamiltonianModel& model, const Vec3& x, const Vec3& v, double p_max) {
  return model.L(model.a().value(x), model.V().value(x), v, p_max);
}

NodalCoefficients sample_coefficients(const HamiltonianModel& model, const TorusGrid& grid) {
  return {model.a().sample(grid), model.V().sample(grid)};
}

}  // namespace mfg
