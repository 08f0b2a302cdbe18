#pragma once

#include <optional>
#include <vector>

namespace mfg {

/// 2/(d(1+mu)-2), or +infinity when d(1+mu) <= 2.
double critical_alpha(int d, double mu);

struct BetaIteration {
  std::vector<double> beta;    // beta_0 = 0, beta_1, ...
  std::vector<double> lambda;  // interpolation weights, bookkeeping only
  std::vector<double> q;       // integrability exponents (2*/2)(beta_{n+1}+1), bookkeeping only
  double limit = 0.0;
};
/// d > 2: beta_{n+1} = 2/(d(1+mu)) (beta_n + 1). d = 2: beta_{n+1} =
/// (p-1)(beta_n + 1)/p with p in (1, 1 + 1/mu) supplied. Returns n_max+1 terms.
BetaIteration beta_iteration(int d, double mu, int n_max, std::optional<double> p = std::nullopt);

/// One branch (theta, upsilon) of the bootstrap exponents.
struct ExponentParams {
  int d = 0;
  double mu = 0.0;
  double alpha = 0.0;
  double theta = 0.0;
  double upsilon = 0.0;
  double beta0 = 0.0;
  // derived
  double r = 0.0;
  double kappa = 0.0;
  double beta = 0.0;  // beta_{upsilon,theta} = theta beta0 / (theta + upsilon - theta upsilon)
  double p = 0.0;     // beta / alpha
  double capa_exponent = 0.0;  // (2+2mu) r upsilon alpha / (theta beta0)
  bool feasible = false;       // p > 1
};

/// Upper end of the beta0 window [1, d(1+mu)/(d(1+mu)-2)), or `cap` when unbounded.
double beta0_upper(int d, double mu, double cap = 64.0);

/// Throws std::invalid_argument when theta <= 1, upsilon outside [0,1],
/// alpha <= 0 or beta0 outside its window; p <= 1 only clears `feasible`.
ExponentParams derive_params(int d, double mu, double alpha, double theta, double upsilon,
                             double beta0, double beta0_cap = 64.0);

/// Contraction exponent of the two branches; they must share (d, mu, alpha, beta0).
double zeta(const ExponentParams& params, const ExponentParams& params_tilde);

struct AdjointStepParams {
  int d = 0;
  double nu = 0.0;
  double kappa_nu = 0.0;  // nu/(2-nu)
  double b = 0.0;         // 2d/(3d-2d nu-2)
  double a = 0.0;         // d/(d(nu-1)+1)
};
/// nu in ((d-1)/d, 1), d >= 2.
AdjointStepParams adjoint_step4_params(int d, double nu);
double kappa_nu(double nu);

struct SearchSpec {
  double theta_max = 16.0;
  double beta0_cap = 64.0;
  int theta_points = 24;    // log-spaced in (1, theta_max]
  int upsilon_points = 11;  // linear in [0, 1]
  int beta0_points = 16;    // linear in [1, upper), upper end excluded
  int refine_levels = 4;
  int refine_points = 5;  // per axis per refinement level
};

struct FeasibilityWitness {
  ExponentParams main;
  ExponentParams tilde;
  double zeta = 0.0;
  double margin = 0.0;  // min(1 - zeta, p - max(d,1), p_tilde - max(d/2,1))
};

struct FeasibilityResult {
  std::optional<FeasibilityWitness> witness;
  FeasibilityWitness best;  // best candidate explored, feasible or not
  // explored box
  double theta_max = 0.0;
  double beta0_lo = 0.0;
  double beta0_hi = 0.0;
  std::size_t candidates = 0;
};

/// Margin of a candidate pair; positive iff all constraints hold.
double feasibility_margin(const ExponentParams& main, const ExponentParams& tilde);

/// Deterministic grid search plus local refinement; ties keep the earliest
/// candidate in lexicographic (beta0, theta, upsilon, theta~, upsilon~) order.
FeasibilityResult feasibility_search(int d, double mu, double alpha, const SearchSpec& spec = {});

}  // namespace mfg
