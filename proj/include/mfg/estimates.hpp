#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mfg/coupler.hpp"

namespace mfg {

/// Probe point for the pointwise (adjoint and Lax-Hopf) checks.
struct Probe {
  Vec3 x0{};
  double tau = 0.0;
};

struct EstimateConfig {
  std::vector<double> r_list{1.5, 2.0};
  std::vector<double> p_list{1.0, 2.0};
  std::optional<double> nu;  // default (2d-1)/(2d)
  std::vector<Probe> probes{{{0.25, 0.0, 0.0}, 0.0}};
  std::optional<double> mhjr_exponent;  // surrogate for 2* when d <= 2
  FPConfig fp;
};

double default_nu(int d);
/// d(1+mu)/(d(1+mu)-2), or +infinity when d(1+mu) <= 2.
double integrability_threshold(int d, double mu);

/// Time trapezoid of <H(x, grad u), m> + <G(eta * m), 1>.
double first_order_quantity(const MFGSolution& sol, const HamiltonianModel& model,
                            const CouplingPower& coupling, const Mollifier* moll);

struct SecondOrderResult {
  double value = 0.0;
  bool floored = false;  // g' evaluated at max(eta * m, 1e-14) somewhere
};
/// Time trapezoid of <g'(eta*m) |grad(eta*m)|^2 + tr(D_pp H (D^2 u)^2) m, 1>.
SecondOrderResult second_order_quantity(const MFGSolution& sol, const HamiltonianModel& model,
                                        const CouplingPower& coupling, const Mollifier* moll);

/// Time trapezoid of ||eta * m||_{L^q}^(alpha+1) with q = (2*/2)(alpha+1) and
/// 2* = 2d/(d-2); for d <= 2 the surrogate 2* is required.
double mhjr_quantity(const MFGSolution& sol, const CouplingPower& coupling, const Mollifier* moll,
                     std::optional<double> surrogate_2star = std::nullopt);

struct DualityTerms {
  double lhs = 0.0;  // <u(0), m(0)> - <u(T), m(T)>
  double rhs = 0.0;  // int <Lhat(x, grad u) + g_eps(m), m> dt
  double residual() const;
};
DualityTerms duality_terms(const MFGSolution& sol, const HamiltonianModel& model,
                           const CouplingPower& coupling, const Mollifier* moll);
double duality_residual(const MFGSolution& sol, const HamiltonianModel& model,
                        const CouplingPower& coupling, const Mollifier* moll);

enum class DriftMode { zero, optimal };

struct LaxHopfResult {
  double lhs = 0.0;  // u(x0, tau)
  double rhs = 0.0;  // int int (L(y, b) + g_eps(m)) zeta + <u_T, zeta(T)>
  double gap() const { return rhs - lhs; }
};
LaxHopfResult lax_hopf_check(const MFGSolution& sol, const HamiltonianModel& model,
                             const CouplingPower& coupling, const Mollifier* moll, DriftMode mode,
                             const Vec3& x0, double tau, const FPConfig& fp = {});

struct RepresentationResult {
  double error = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double adjoint_H_integral = 0.0;
  double adjoint_grad_nu_integral = 0.0;
  std::size_t node = 0;
  int tau_index = 0;
};
RepresentationResult representation_check(const MFGSolution& sol, const HamiltonianModel& model,
                                          const CouplingPower& coupling, const Mollifier* moll,
                                          const Vec3& x0, double tau, double nu,
                                          const FPConfig& fp = {});

struct NormSeries {
  std::vector<double> r_list;
  std::vector<double> p_list;
  std::vector<bool> r_at_or_above_threshold;
  std::vector<double> time;
  std::vector<double> mass;
  std::vector<double> min_m;
  std::vector<double> u_sup;
  std::vector<double> du_sup;
  std::vector<std::vector<double>> m_lr;  // [r index][time node]
  std::vector<std::vector<double>> g_lp;  // [p index][time node]

  static double max_of(const std::vector<double>& s);
};
NormSeries norm_series(const MFGSolution& sol, const HamiltonianModel& model,
                       const std::vector<double>& r_list, const std::vector<double>& p_list,
                       const CouplingPower& coupling, const Mollifier* moll);

struct ProbeReport {
  Probe probe;
  RepresentationResult representation;
  LaxHopfResult lax_hopf_zero;
  LaxHopfResult lax_hopf_optimal;
};

struct EstimateReport {
  double epsilon = 0.0;
  NormSeries series;
  double first_order_Q1 = 0.0;
  double second_order_Q2 = 0.0;
  bool second_order_floored = false;
  std::optional<double> mhjr_integral;
  double duality_residual = 0.0;
  double nu = 0.0;
  std::vector<ProbeReport> probes;
  // A3 bound comparison: adjoint_H_integral / (1 + ||u||_inf) per probe
  double a3_constant = 0.0;

  /// Scalars in output order, including per-probe entries.
  std::vector<std::pair<std::string, double>> scalars() const;
};

EstimateReport build_report(const MFGSolution& sol, const HamiltonianModel& model,
                            const CouplingPower& coupling, const EstimateConfig& cfg,
                            double a3_constant = 0.0);

/// Series block (header + one row per time node), blank line, then a
/// key,value block of scalars.
void write_report_csv(const EstimateReport& report, std::ostream& os);

}  // namespace mfg
