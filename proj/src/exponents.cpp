#include "mfg/exponents.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mfg {

double critical_alpha(int d, double mu) {
  const double denom = d * (1.0 + mu) - 2.0;
  return denom > 0.0 ? 2.0 / denom : std::numeric_limits<double>::infinity();
}

BetaIteration beta_iteration(int d, double mu, int n_max, std::optional<double> p) {
  if (n_max < 0) throw std::invalid_argument("beta_iteration: n_max must be nonnegative");
  if (!(mu >= 0.0 && mu < 1.0)) throw std::invalid_argument("beta_iteration: mu must lie in [0, 1)");
  BetaIteration out;
  double ratio = 0.0;
  if (d > 2) {
    ratio = 2.0 / (d * (1.0 + mu));
    out.limit = 2.0 / (d * (1.0 + mu) - 2.0);
  } else if (d == 2) {
    const double hi = mu > 0.0 ? 1.0 + 1.0 / mu : std::numeric_limits<double>::infinity();
    if (!p || !(*p > 1.0 && *p < hi)) {
      std::ostringstream os;
      os << "beta_iteration: d = 2 needs p in (1, " << hi << ")";
      throw std::invalid_argument(os.str());
    }
    ratio = (*p - 1.0) / *p;
    out.limit = *p - 1.0;
  } else {
    throw std::invalid_argument("beta_iteration: defined for d >= 2");
  }
  out.beta.push_back(0.0);
  for (int n = 0; n < n_max; ++n) out.beta.push_back(ratio * (out.beta.back() + 1.0));
  for (int n = 0; n + 1 < static_cast<int>(out.beta.size()); ++n) {
    const double b = out.beta[static_cast<std::size_t>(n)];
    const double b1 = out.beta[static_cast<std::size_t>(n + 1)];
    const double q = d > 2 ? d / (d - 2.0) * (b1 + 1.0) : *p * (b1 + 1.0) / (1.0 + mu - mu * *p);
    out.q.push_back(q);
    out.lambda.push_back(q / (q - b - 1.0) * ((2.0 + mu) * b1 - b) / (1.0 + (2.0 + mu) * b1));
  }
  return out;
}

double beta0_upper(int d, double mu, double cap) {
  const double s = d * (1.0 + mu);
  return s > 2.0 ? s / (s - 2.0) : cap;
}

namespace {

struct Branch {
  double r, kappa, beta, p, capa;
};

Branch branch(int d, double mu, double alpha, double theta, double upsilon, double beta0) {
  Branch b;
  b.r = (d * (theta - 1.0) + 2.0) / 2.0;
  b.kappa = 2.0 / (d * (theta - 1.0) + 2.0);
  b.beta = theta * beta0 / (theta + upsilon - theta * upsilon);
  b.p = b.beta / alpha;
  b.capa = (2.0 + 2.0 * mu) * b.r * upsilon * alpha / (theta * beta0);
  return b;
}

}  // namespace

ExponentParams derive_params(int d, double mu, double alpha, double theta, double upsilon,
                             double beta0, double beta0_cap) {
  if (d < 1) throw std::invalid_argument("derive_params: d must be positive");
  if (!(theta > 1.0)) throw std::invalid_argument("derive_params: theta must exceed 1");
  if (!(upsilon >= 0.0 && upsilon <= 1.0))
    throw std::invalid_argument("derive_params: upsilon must lie in [0, 1]");
  if (!(alpha > 0.0)) throw std::invalid_argument("derive_params: alpha must be positive");
  const double hi = beta0_upper(d, mu, beta0_cap);
  if (!(beta0 >= 1.0 && beta0 < hi)) {
    std::ostringstream os;
    os << "derive_params: beta0 must lie in [1, " << hi << ")";
    throw std::invalid_argument(os.str());
  }
  const Branch b = branch(d, mu, alpha, theta, upsilon, beta0);
  ExponentParams e{d, mu, alpha, theta, upsilon, beta0, b.r, b.kappa, b.beta, b.p, b.capa, b.p > 1.0};
  return e;
}

double zeta(const ExponentParams& x, const ExponentParams& y) {
  if (x.d != y.d || x.mu != y.mu || x.alpha != y.alpha || x.beta0 != y.beta0)
    throw std::invalid_argument("zeta: branches must share d, mu, alpha and beta0");
  if (x.mu == 1.0) throw std::invalid_argument("zeta: undefined at mu = 1");
  const double c = (2.0 + 2.0 * x.mu) * x.alpha / ((1.0 - x.mu) * x.beta0);
  return c * x.r * x.upsilon / x.theta + c * y.r * y.upsilon / y.theta;
}

double kappa_nu(double nu) { return nu / (2.0 - nu); }

AdjointStepParams adjoint_step4_params(int d, double nu) {
  if (d < 2) throw std::invalid_argument("adjoint_step4_params: needs d >= 2 (b > 2 fails for d = 1)");
  const double lo = (d - 1.0) / d;
  if (!(nu > lo && nu < 1.0)) {
    std::ostringstream os;
    os << "adjoint_step4_params: nu must lie in (" << lo << ", 1)";
    throw std::invalid_argument(os.str());
  }
  AdjointStepParams s;
  s.d = d;
  s.nu = nu;
  s.kappa_nu = kappa_nu(nu);
  s.b = 2.0 * d / (3.0 * d - 2.0 * d * nu - 2.0);
  s.a = d / (d * (nu - 1.0) + 1.0);
  return s;
}

double feasibility_margin(const ExponentParams& x, const ExponentParams& y) {
  const double z = zeta(x, y);
  const double d = x.d;
  return std::min({1.0 - z, x.p - std::max(d, 1.0), y.p - std::max(d / 2.0, 1.0)});
}

namespace {

// Coordinates: beta0, log theta, upsilon, log theta~, upsilon~.
using Point = std::array<double, 5>;

struct Evaluator {
  int d;
  double mu, alpha;
  double need_p, need_pt;
  double c;  // (2+2mu) alpha / (1-mu)

  double margin(const Point& x) const {
    const double t1 = std::exp(x[1]);
    const double t2 = std::exp(x[3]);
    const Branch b1 = branch(d, mu, alpha, t1, x[2], x[0]);
    const Branch b2 = branch(d, mu, alpha, t2, x[4], x[0]);
    const double z = c * (b1.r * x[2] / t1 + b2.r * x[4] / t2) / x[0];
    return std::min({1.0 - z, b1.p - need_p, b2.p - need_pt});
  }
};

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v;
  if (n == 1) return {0.5 * (lo + hi)};
  for (int i = 0; i < n; ++i) v.push_back(lo + (hi - lo) * i / (n - 1));
  return v;
}

}  // namespace

FeasibilityResult feasibility_search(int d, double mu, double alpha, const SearchSpec& spec) {
  if (d < 1) throw std::invalid_argument("feasibility_search: d must be positive");
  if (!(mu >= 0.0 && mu < 1.0)) throw std::invalid_argument("feasibility_search: mu must lie in [0, 1)");
  if (!(alpha > 0.0)) throw std::invalid_argument("feasibility_search: alpha must be positive");
  if (!(spec.theta_max > 1.0) || spec.theta_points < 1 || spec.upsilon_points < 2 ||
      spec.beta0_points < 1 || spec.refine_points < 2 || spec.refine_levels < 0)
    throw std::invalid_argument("feasibility_search: invalid search spec");

  const double b_hi = beta0_upper(d, mu, spec.beta0_cap);
  const double log_tmax = std::log(spec.theta_max);
  const double log_tmin = log_tmax * 1e-6;  // keeps theta > 1
  const Evaluator ev{d, mu, alpha, std::max<double>(d, 1.0), std::max(d / 2.0, 1.0),
                     (2.0 + 2.0 * mu) * alpha / (1.0 - mu)};
  FeasibilityResult res;
  res.theta_max = spec.theta_max;
  res.beta0_lo = 1.0;
  res.beta0_hi = b_hi;

  // Coarse grid; the beta0 window's open upper end is excluded.
  std::vector<double> b0s;
  for (int i = 0; i < spec.beta0_points; ++i)
    b0s.push_back(1.0 + (b_hi - 1.0) * i / spec.beta0_points);
  std::vector<double> lts;
  for (int j = 0; j < spec.theta_points; ++j) lts.push_back(log_tmax * (j + 1.0) / spec.theta_points);
  const std::vector<double> ups = linspace(0.0, 1.0, spec.upsilon_points);

  Point best{};
  double best_m = -std::numeric_limits<double>::infinity();
  auto consider = [&](const Point& x) {
    ++res.candidates;
    const double m = ev.margin(x);
    if (m > best_m) {
      best_m = m;
      best = x;
    }
  };
  for (double b0 : b0s)
    for (double lt1 : lts)
      for (double u1 : ups)
        for (double lt2 : lts)
          for (double u2 : ups) consider({b0, lt1, u1, lt2, u2});

  // Local refinement around the incumbent.
  Point step{(b_hi - 1.0) / spec.beta0_points, log_tmax / spec.theta_points,
             1.0 / (spec.upsilon_points - 1), log_tmax / spec.theta_points,
             1.0 / (spec.upsilon_points - 1)};
  const Point lo{1.0, log_tmin, 0.0, log_tmin, 0.0};
  const Point hi{std::nextafter(b_hi, 1.0), log_tmax, 1.0, log_tmax, 1.0};
  for (int level = 0; level < spec.refine_levels; ++level) {
    std::array<std::vector<double>, 5> axes;
    for (int a = 0; a < 5; ++a) {
      const double l = std::max(lo[a], best[a] - step[a]);
      const double h = std::min(hi[a], best[a] + step[a]);
      axes[a] = linspace(l, h, spec.refine_points);
    }
    for (double x0 : axes[0])
      for (double x1 : axes[1])
        for (double x2 : axes[2])
          for (double x3 : axes[3])
            for (double x4 : axes[4]) consider({x0, x1, x2, x3, x4});
    for (double& s : step) s *= 2.0 / (spec.refine_points - 1);
  }

  FeasibilityWitness w;
  w.main = derive_params(d, mu, alpha, std::exp(best[1]), best[2], best[0], spec.beta0_cap);
  w.tilde = derive_params(d, mu, alpha, std::exp(best[3]), best[4], best[0], spec.beta0_cap);
  w.zeta = zeta(w.main, w.tilde);
  w.margin = feasibility_margin(w.main, w.tilde);
  res.best = w;
  if (w.margin > 0.0) res.witness = w;
  return res;
}

}  // namespace mfg
