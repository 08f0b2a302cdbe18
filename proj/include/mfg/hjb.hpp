#pragma once

#include "mfg/hamiltonian.hpp"
#include "mfg/history.hpp"

namespace mfg {

enum class Stabilization { central, upwind };

struct HJBConfig {
  Stabilization stabilization = Stabilization::central;
  double peclet_warn_threshold = 1.0;  // mesh-Peclet h |D_p H| / 2
  // The implicit diffusion solve is exact (diagonalized), so this is only
  // recorded; it bounds nothing.
  double linear_solver_tol = 1e-12;
  // Step-size violations throw instead of warning.
  bool strict = false;
};

struct HJBDiagnostics {
  double max_cfl = 0.0;  // dt * max(1, max |D_p H|) / h over all steps
  int cfl_violations = 0;  // steps where max_cfl exceeded 0.5
  int first_cfl_violation = -1;
  double max_peclet = 0.0;
  int peclet_warnings = 0;
};

struct HJBSolve {
  FieldHistory u;
  HJBDiagnostics diagnostics;
};

/// Largest admissible dt for the current gradient: 0.5 h / max(1, max |D_p H|).
double hjb_step_limit(const HamiltonianModel& model, const NodalCoefficients& coeff,
                      const ScalarField& u);

/// Backward IMEX Euler: (I - dt Lap) u^k = u^{k+1} - dt (H(x, grad u^{k+1}) - f^{k+1}).
HJBSolve solve_hjb(const HamiltonianModel& model, const TorusGrid& grid, const TimeGrid& tgrid,
                   const ScalarField& u_T, const FieldHistory& f, const HJBConfig& cfg = {});

/// H(x, grad u) at every node with the configured gradient.
ScalarField hamiltonian_field(const HamiltonianModel& model, const NodalCoefficients& coeff,
                              const ScalarField& u, Stabilization stab = Stabilization::central);

}  // namespace mfg
