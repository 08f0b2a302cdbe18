#pragma once

#include <vector>

#include "mfg/hamiltonian.hpp"
#include "mfg/history.hpp"

namespace mfg {

enum class DriftScheme {
  central_transpose,  // exact negative transpose of b . grad (default)
  upwind_flux         // face-upwinded flux: mass-conserving, not exactly dual
};

struct FPConfig {
  DriftScheme scheme = DriftScheme::central_transpose;
  double initial_mass_tol = 1e-10;
  double mass_drift_limit = 1e-8;
};

struct FPDiagnostics {
  double min_value = 0.0;  // over all stored frames
  int min_step = 0;
  double max_mass_drift = 0.0;
  bool positivity_lost = false;
};

struct FPSolve {
  FieldHistory m;
  FPDiagnostics diagnostics;
};

/// One drift field per time node 0..nt.
using DriftHistory = std::vector<VectorField>;

/// D_p H(x, grad u^k) for every frame of u.
DriftHistory hamiltonian_drift(const HamiltonianModel& model, const FieldHistory& u);

/// D(b, w) = div(b w): the exact negative transpose of v -> b . grad v.
void transport_term(const VectorField& b, const ScalarField& w, ScalarField& out);

/// m_t - div(b m) = Lap m: (I - dt Lap) m^{k+1} = m^k + dt D(b^k, m^k).
FPSolve solve_fp(const TorusGrid& grid, const TimeGrid& tgrid, const ScalarField& m_0,
                 const DriftHistory& drift, const FPConfig& cfg = {});

/// Same evolution started at time node tau from the discrete delta 1/h^d at x0.
FPSolve solve_adjoint(const TorusGrid& grid, const TimeGrid& tgrid, int tau, std::size_t x0,
                      const DriftHistory& drift, const FPConfig& cfg = {});

/// Discrete delta of unit mass at a node.
ScalarField discrete_delta(const TorusGrid& grid, std::size_t node);

/// Time trapezoid of <|grad(rho^(nu/2))|^2, 1> over the stored frames; 0 < nu < 1.
double rho_grad_power_integral(const FieldHistory& rho, double nu);

}  // namespace mfg
