#include "mfg/hjb.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mfg/log.hpp"
#include "mfg/spectral.hpp"

namespace mfg {
namespace {

constexpr double cfl_limit = 0.5;

// Godunov-type squared slope per axis: max(max(D-,0)^2, min(D+,0)^2).
Vec3 upwind_slopes(const ScalarField& u, std::size_t node) {
  const TorusGrid& g = u.grid();
  const double h = g.spacing();
  Vec3 p{0.0, 0.0, 0.0};
  for (int i = 0; i < g.dim(); ++i) {
    const double c = u[node];
    const double bwd = (c - u[g.neighbor(node, i, -1)]) / h;
    const double fwd = (u[g.neighbor(node, i, 1)] - c) / h;
    const double a = std::max(bwd, 0.0);
    const double b = std::min(fwd, 0.0);
    p[i] = std::sqrt(std::max(a * a, b * b));
  }
  return p;
}

struct StepScan {
  double max_speed = 0.0;  // max |D_p H|
};

// Writes H(x, grad u) into out and returns the largest |D_p H|.
StepScan evaluate_H(const HamiltonianModel& model, const NodalCoefficients& coeff,
                    const ScalarField& u, Stabilization stab, VectorField& grad,
                    ScalarField& out) {
  const TorusGrid& g = u.grid();
  const int d = g.dim();
  StepScan scan;
  gradient_central(u, grad);
  for (std::size_t node = 0; node < g.size(); ++node) {
    const Vec3 pc = grad.vec(node);
    const Vec3 p = stab == Stabilization::upwind ? upwind_slopes(u, node) : pc;
    out[node] = model.H(coeff.a[node], coeff.V[node], p);
    const Vec3 b = model.DpH(coeff.a[node], pc);
    scan.max_speed = std::max(scan.max_speed, std::sqrt(dot(b, b, d)));
  }
  return scan;
}

}  // namespace

double hjb_step_limit(const HamiltonianModel& model, const NodalCoefficients& coeff,
                      const ScalarField& u) {
  const VectorField grad = gradient_central(u);
  double speed = 0.0;
  for (std::size_t node = 0; node < u.size(); ++node) {
    const Vec3 b = model.DpH(coeff.a[node], grad.vec(node));
    speed = std::max(speed, std::sqrt(dot(b, b, model.dim())));
  }
  return cfl_limit * u.grid().spacing() / std::max(1.0, speed);
}

ScalarField hamiltonian_field(const HamiltonianModel& model, const NodalCoefficients& coeff,
                              const ScalarField& u, Stabilization stab) {
  VectorField grad(u.grid());
  ScalarField out(u.grid());
  evaluate_H(model, coeff, u, stab, grad, out);
  return out;
}

HJBSolve solve_hjb(const HamiltonianModel& model, const TorusGrid& grid, const TimeGrid& tgrid,
                   const ScalarField& u_T, const FieldHistory& f, const HJBConfig& cfg) {
  require_same_grid(grid, u_T.grid(), "solve_hjb: terminal data");
  require_same_grid(grid, f.grid(), "solve_hjb: source");
  if (model.dim() != grid.dim()) throw GridMismatchError("solve_hjb: model and grid dimension differ");
  if (f.first_index() != 0 || !(f.time_grid() == tgrid))
    throw GridMismatchError("solve_hjb: source must have one frame per time node");
  if (!(cfg.peclet_warn_threshold > 0.0) || !(cfg.linear_solver_tol > 0.0))
    throw std::invalid_argument("solve_hjb: thresholds must be positive");

  const double dt = tgrid.dt();
  const double h = grid.spacing();
  const NodalCoefficients coeff = sample_coefficients(model, grid);
  const ImplicitDiffusion diffusion(grid, dt);

  HJBSolve out{FieldHistory(grid, tgrid, u_T), {}};
  auto& diag = out.diagnostics;
  VectorField grad(grid);
  ScalarField Hk(grid);
  ScalarField rhs(grid);

  for (int k = tgrid.steps() - 1; k >= 0; --k) {
    const ScalarField& next = out.u.at(k + 1);
    const StepScan scan = evaluate_H(model, coeff, next, cfg.stabilization, grad, Hk);
    const double cfl = dt * std::max(1.0, scan.max_speed) / h;
    const double peclet = 0.5 * h * scan.max_speed;
    diag.max_cfl = std::max(diag.max_cfl, cfl);
    diag.max_peclet = std::max(diag.max_peclet, peclet);
    if (cfl > cfl_limit) {
      if (diag.cfl_violations++ == 0) {
        diag.first_cfl_violation = k;
        std::ostringstream os;
        os << "solve_hjb: step " << k << " has CFL number " << cfl << " > " << cfl_limit
           << " (dt = " << dt << ", h = " << h << ")";
        if (cfg.strict) throw StepSizeError(os.str(), k, cfl);
        log::warn(os.str());
      }
    }
    if (peclet > cfg.peclet_warn_threshold && diag.peclet_warnings++ == 0)
      log::warn("solve_hjb: mesh-Peclet number ", peclet, " exceeds ",
                cfg.peclet_warn_threshold, " at step ", k);

    const ScalarField& fk = f.at(k + 1);
    for (std::size_t i = 0; i < grid.size(); ++i) rhs[i] = next[i] - dt * (Hk[i] - fk[i]);
    ScalarField& cur = out.u.at(k);
    diffusion.solve(rhs, cur);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (!std::isfinite(cur[i])) {
        std::ostringstream os;
        os << "solve_hjb: non-finite value at step " << k << " (CFL number " << cfl
           << "); reduce dt";
        throw StepSizeError(os.str(), k, cfl);
      }
    }
  }
  return out;
}

}  // namespace mfg
