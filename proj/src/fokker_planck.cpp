#include "mfg/fokker_planck.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mfg/error.hpp"
#include "mfg/log.hpp"
#include "mfg/spectral.hpp"

namespace mfg {
namespace {

// m_t = div(b m) written as a conservative flux with velocity -b: upwinded
// on faces, so F_{i+1/2} = c m_i when c > 0 and c m_{i+1} otherwise.
void upwind_transport(const VectorField& b, const ScalarField& w, ScalarField& out) {
  const TorusGrid& g = w.grid();
  const double h = g.spacing();
  std::fill(out.values().begin(), out.values().end(), 0.0);
  for (std::size_t node = 0; node < g.size(); ++node) {
    for (int i = 0; i < g.dim(); ++i) {
      const std::size_t right = g.neighbor(node, i, 1);
      const double c = -0.5 * (b.at(node, i) + b.at(right, i));
      const double flux = c > 0.0 ? c * w[node] : c * w[right];
      out[node] -= flux / h;
      out[right] += flux / h;
    }
  }
}

FPSolve evolve(const TorusGrid& grid, const TimeGrid& tgrid, int first, const ScalarField& start,
               const DriftHistory& drift, const FPConfig& cfg) {
  if (drift.size() != static_cast<std::size_t>(tgrid.steps() + 1))
    throw GridMismatchError("solve_fp: drift must have one frame per time node");
  for (const auto& b : drift) require_same_grid(grid, b.grid(), "solve_fp: drift");

  const double dt = tgrid.dt();
  const ImplicitDiffusion diffusion(grid, dt);
  const double mass0 = mass(start);

  FPSolve out{FieldHistory(grid, tgrid, start, first), {}};
  auto& diag = out.diagnostics;
  diag.min_value = min_value(start);
  diag.min_step = first;
  ScalarField rhs(grid);
  ScalarField adv(grid);
  for (int k = first; k < tgrid.steps(); ++k) {
    const ScalarField& cur = out.m.at(k);
    if (cfg.scheme == DriftScheme::upwind_flux)
      upwind_transport(drift[static_cast<std::size_t>(k)], cur, adv);
    else
      transport_term(drift[static_cast<std::size_t>(k)], cur, adv);
    for (std::size_t i = 0; i < grid.size(); ++i) rhs[i] = cur[i] + dt * adv[i];
    ScalarField& next = out.m.at(k + 1);
    diffusion.solve(rhs, next);

    double lo = next[0];
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (!std::isfinite(next[i])) {
        std::ostringstream os;
        os << "solve_fp: non-finite density at step " << k + 1 << "; reduce dt";
        throw StepSizeError(os.str(), k + 1, dt / grid.spacing());
      }
      lo = std::min(lo, next[i]);
    }
    if (lo < diag.min_value) {
      diag.min_value = lo;
      diag.min_step = k + 1;
    }
    const double drift_now = std::abs(mass(next) - mass0);
    diag.max_mass_drift = std::max(diag.max_mass_drift, drift_now);
    if (drift_now > cfg.mass_drift_limit) {
      std::ostringstream os;
      os << "solve_fp: mass drifted by " << drift_now << " at step " << k + 1;
      throw ConsistencyError(os.str());
    }
  }
  if (diag.min_value < 0.0) {
    diag.positivity_lost = true;
    log::info("solve_fp: density reached ", diag.min_value, " at step ", diag.min_step);
  }
  return out;
}

}  // namespace

DriftHistory hamiltonian_drift(const HamiltonianModel& model, const FieldHistory& u) {
  const TorusGrid& g = u.grid();
  const NodalCoefficients coeff = sample_coefficients(model, g);
  DriftHistory out;
  out.reserve(static_cast<std::size_t>(u.last_index() + 1));
  VectorField grad(g);
  for (int k = 0; k <= u.last_index(); ++k) {
    VectorField b(g);
    if (k >= u.first_index()) {
      gradient_central(u.at(k), grad);
      for (std::size_t node = 0; node < g.size(); ++node)
        b.set(node, model.DpH(coeff.a[node], grad.vec(node)));
    }
    out.push_back(std::move(b));
  }
  return out;
}

void transport_term(const VectorField& b, const ScalarField& w, ScalarField& out) {
  VectorField bw(w.grid());
  const int d = w.grid().dim();
  for (std::size_t node = 0; node < w.size(); ++node)
    for (int i = 0; i < d; ++i) bw.at(node, i) = b.at(node, i) * w[node];
  divergence(bw, out);
}

ScalarField discrete_delta(const TorusGrid& grid, std::size_t node) {
  ScalarField out(grid);
  out[node] = 1.0 / grid.cell_volume();
  return out;
}

FPSolve solve_fp(const TorusGrid& grid, const TimeGrid& tgrid, const ScalarField& m_0,
                 const DriftHistory& drift, const FPConfig& cfg) {
  require_same_grid(grid, m_0.grid(), "solve_fp: initial density");
  const double m = mass(m_0);
  if (std::abs(m - 1.0) > cfg.initial_mass_tol) {
    std::ostringstream os;
    os << "solve_fp: initial density has mass " << m << ", expected 1";
    throw std::invalid_argument(os.str());
  }
  if (min_value(m_0) < 0.0) throw std::invalid_argument("solve_fp: initial density is negative");
  return evolve(grid, tgrid, 0, m_0, drift, cfg);
}

FPSolve solve_adjoint(const TorusGrid& grid, const TimeGrid& tgrid, int tau, std::size_t x0,
                      const DriftHistory& drift, const FPConfig& cfg) {
  if (tau < 0 || tau >= tgrid.steps())
    throw std::invalid_argument("solve_adjoint: tau must be a time node before T");
  if (x0 >= grid.size()) throw std::invalid_argument("solve_adjoint: x0 is not a grid node");
  return evolve(grid, tgrid, tau, discrete_delta(grid, x0), drift, cfg);
}

double rho_grad_power_integral(const FieldHistory& rho, double nu) {
  if (!(nu > 0.0 && nu < 1.0))
    throw std::invalid_argument("rho_grad_power_integral: nu must lie in (0, 1)");
  const TorusGrid& g = rho.grid();
  std::vector<double> series(static_cast<std::size_t>(rho.last_index() + 1), 0.0);
  ScalarField w(g);
  VectorField grad(g);
  for (int k = rho.first_index(); k <= rho.last_index(); ++k) {
    const ScalarField& r = rho.at(k);
    for (std::size_t i = 0; i < g.size(); ++i) w[i] = std::pow(std::max(r[i], 0.0), 0.5 * nu);
    gradient_central(w, grad);
    series[static_cast<std::size_t>(k)] = inner(grad, grad);
  }
  return time_trapezoid(series, rho.time_grid().dt(), rho.first_index(), rho.last_index());
}

}  // namespace mfg
