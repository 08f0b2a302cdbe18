#pragma once

#include <optional>
#include <vector>

#include "mfg/fokker_planck.hpp"
#include "mfg/hjb.hpp"
#include "mfg/mollifier.hpp"

namespace mfg {

/// g(m) = m^alpha. `constant` replaces g by a fixed value (decoupled test hook).
struct CouplingPower {
  double alpha = 1.0;
  std::optional<double> constant;

  explicit CouplingPower(double a, std::optional<double> c = std::nullopt);
  double g(double z) const;
  double dg(double z) const;
  /// Antiderivative G with G(0) = 0.
  double G(double z) const;
  /// alpha >= 2/(d(1+mu)-2): outside the hypothesis of the existence theorem.
  bool above_critical(int d, double mu) const;
};

struct CouplingResult {
  ScalarField value;
  double clip = 0.0;  // largest |negative part| clipped from m
};

/// eta * g(eta * max(m, 0)). With moll == nullptr (epsilon = 0) the plain pointwise power.
CouplingResult coupling_g_eps(const ScalarField& m, const CouplingPower& coupling,
                              const Mollifier* moll,
                              ConvolutionPath path = ConvolutionPath::automatic);
ScalarField coupling_g_eps(const ScalarField& m, double alpha, const Mollifier& moll);

struct FixpointConfig {
  double damping = 0.5;  // omega in (0, 1]
  double tol = 1e-6;
  int max_iter = 200;
  std::vector<double> epsilon_schedule{0.1, 0.05, 0.025};
  bool warm_start = true;
  bool strict = false;  // negative-density clips above clip_limit become errors
  double clip_limit = 1e-6;
  HJBConfig hjb;
  FPConfig fp;
};

struct MFGSolution {
  FieldHistory u;
  FieldHistory m;
  double epsilon = 0.0;
  int iterations = 0;
  std::vector<double> residual_history;
  double max_clip = 0.0;
  HJBDiagnostics hjb;
  FPDiagnostics fp;
};

/// Damped Picard iteration on m for each epsilon of the schedule; entry i of
/// the result belongs to epsilon_schedule[i]. Each returned pair is mutually
/// consistent: u solves HJ with source g_eps(m_iter) and m solves FP with
/// the drift of u.
std::vector<MFGSolution> solve_mfg(const HamiltonianModel& model, const TorusGrid& grid,
                                   const TimeGrid& tgrid, const ScalarField& u_T,
                                   const ScalarField& m_0, const CouplingPower& coupling,
                                   const FixpointConfig& cfg);

/// g_eps(m) for every frame of a history.
FieldHistory coupling_history(const FieldHistory& m, const CouplingPower& coupling,
                              const Mollifier* moll, double* max_clip = nullptr);

}  // namespace mfg
