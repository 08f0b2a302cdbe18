#include "mfg/coupler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "mfg/error.hpp"
#include "mfg/log.hpp"

namespace mfg {

CouplingPower::CouplingPower(double a, std::optional<double> c) : alpha(a), constant(c) {
  if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("CouplingPower: alpha must be positive");
}

double CouplingPower::g(double z) const { return constant ? *constant : std::pow(z, alpha); }

double CouplingPower::dg(double z) const {
  return constant ? 0.0 : alpha * std::pow(z, alpha - 1.0);
}

double CouplingPower::G(double z) const {
  return constant ? *constant * z : std::pow(z, alpha + 1.0) / (alpha + 1.0);
}

bool CouplingPower::above_critical(int d, double mu) const {
  const double denom = d * (1.0 + mu) - 2.0;
  return denom > 0.0 && alpha >= 2.0 / denom;
}

CouplingResult coupling_g_eps(const ScalarField& m, const CouplingPower& coupling,
                              const Mollifier* moll, ConvolutionPath path) {
  CouplingResult out{ScalarField(m.grid()), 0.0};
  ScalarField clipped = m;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (clipped[i] < 0.0) {
      out.clip = std::max(out.clip, -clipped[i]);
      clipped[i] = 0.0;
    }
  }
  ScalarField inner_field = moll ? mollify(clipped, *moll, path) : clipped;
  for (std::size_t i = 0; i < m.size(); ++i)
    inner_field[i] = coupling.g(std::max(inner_field[i], 0.0));
  out.value = moll ? mollify(inner_field, *moll, path) : inner_field;
  // the mollified output of a nonnegative field can carry -1e-17 rounding
  for (double& v : out.value.values()) v = std::max(v, 0.0);
  return out;
}

ScalarField coupling_g_eps(const ScalarField& m, double alpha, const Mollifier& moll) {
  return coupling_g_eps(m, CouplingPower(alpha), &moll).value;
}

FieldHistory coupling_history(const FieldHistory& m, const CouplingPower& coupling,
                              const Mollifier* moll, double* max_clip) {
  FieldHistory out(m.grid(), m.time_grid(), m.first_index());
  double clip = 0.0;
  for (int k = m.first_index(); k <= m.last_index(); ++k) {
    CouplingResult r = coupling_g_eps(m.at(k), coupling, moll);
    clip = std::max(clip, r.clip);
    out.at(k) = std::move(r.value);
  }
  if (max_clip) *max_clip = clip;
  return out;
}

namespace {

double history_max_diff(const FieldHistory& a, const FieldHistory& b) {
  double out = 0.0;
  for (int k = a.first_index(); k <= a.last_index(); ++k) {
    const auto& x = a.at(k);
    const auto& y = b.at(k);
    for (std::size_t i = 0; i < x.size(); ++i) out = std::max(out, std::abs(x[i] - y[i]));
  }
  return out;
}

double history_l1_diff(const FieldHistory& a, const FieldHistory& b) {
  double out = 0.0;
  const double h_d = a.grid().cell_volume();
  for (int k = a.first_index(); k <= a.last_index(); ++k) {
    const auto& x = a.at(k);
    const auto& y = b.at(k);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += std::abs(x[i] - y[i]);
    out = std::max(out, s * h_d);
  }
  return out;
}

void validate(const FixpointConfig& cfg) {
  if (!(cfg.damping > 0.0 && cfg.damping <= 1.0))
    throw std::invalid_argument("solve_mfg: damping must lie in (0, 1]");
  if (!(cfg.tol > 0.0)) throw std::invalid_argument("solve_mfg: tol must be positive");
  if (cfg.max_iter < 1) throw std::invalid_argument("solve_mfg: max_iter must be at least 1");
  if (cfg.epsilon_schedule.empty())
    throw std::invalid_argument("solve_mfg: epsilon schedule is empty");
  for (std::size_t i = 0; i < cfg.epsilon_schedule.size(); ++i) {
    if (!(cfg.epsilon_schedule[i] > 0.0))
      throw std::invalid_argument("solve_mfg: epsilon values must be positive");
    if (i > 0 && !(cfg.epsilon_schedule[i] < cfg.epsilon_schedule[i - 1]))
      throw std::invalid_argument("solve_mfg: epsilon schedule must be strictly decreasing");
  }
}

}  // namespace

std::vector<MFGSolution> solve_mfg(const HamiltonianModel& model, const TorusGrid& grid,
                                   const TimeGrid& tgrid, const ScalarField& u_T,
                                   const ScalarField& m_0, const CouplingPower& coupling,
                                   const FixpointConfig& cfg) {
  validate(cfg);
  if (coupling.above_critical(grid.dim(), model.mu()))
    log::warn("solve_mfg: alpha = ", coupling.alpha, " is at or above the critical exponent");
  const double w = cfg.damping;

  std::vector<MFGSolution> stages;
  FieldHistory m_iter(grid, tgrid, m_0);  // cold start: m_0 in every frame
  for (double eps : cfg.epsilon_schedule) {
    const Mollifier moll(grid, eps);
    if (!cfg.warm_start || stages.empty()) m_iter = FieldHistory(grid, tgrid, m_0);
    FieldHistory u_prev(grid, tgrid);  // u^(0) = 0
    FieldHistory m_prev = m_iter;
    std::vector<double> residuals;
    double max_clip = 0.0;
    bool converged = false;
    for (int it = 1; it <= cfg.max_iter; ++it) {
      double clip = 0.0;
      const FieldHistory f = coupling_history(m_iter, coupling, &moll, &clip);
      max_clip = std::max(max_clip, clip);
      if (clip > cfg.clip_limit) {
        std::ostringstream os;
        os << "solve_mfg: clipped negative density of size " << clip << " at iteration " << it;
        if (cfg.strict) throw ConsistencyError(os.str());
        log::warn(os.str());
      }
      HJBSolve hj = solve_hjb(model, grid, tgrid, u_T, f, cfg.hjb);
      FPSolve fp = solve_fp(grid, tgrid, m_0, hamiltonian_drift(model, hj.u), cfg.fp);
      for (int k = 0; k <= tgrid.steps(); ++k) {
        ScalarField& mk = m_iter.at(k);
        const ScalarField& hat = fp.m.at(k);
        for (std::size_t i = 0; i < grid.size(); ++i) mk[i] = (1.0 - w) * mk[i] + w * hat[i];
      }
      const double res = history_max_diff(hj.u, u_prev) + history_l1_diff(m_iter, m_prev);
      residuals.push_back(res);
      log::debug("solve_mfg: eps = ", eps, " iteration ", it, " residual ", res);
      if (!std::isfinite(res))
        throw ConvergenceError("solve_mfg: residual became non-finite", residuals);
      u_prev = std::move(hj.u);
      m_prev = m_iter;
      if (res < cfg.tol) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      std::ostringstream os;
      os << "solve_mfg: no convergence within " << cfg.max_iter << " iterations at eps = " << eps
         << " (last residual " << residuals.back() << ")";
      throw ConvergenceError(os.str(), residuals);
    }
    // Final consistent pair from the converged iterate.
    const FieldHistory f = coupling_history(m_iter, coupling, &moll);
    HJBSolve hj = solve_hjb(model, grid, tgrid, u_T, f, cfg.hjb);
    FPSolve fp = solve_fp(grid, tgrid, m_0, hamiltonian_drift(model, hj.u), cfg.fp);
    MFGSolution sol{std::move(hj.u), std::move(fp.m), eps, static_cast<int>(residuals.size()),
                    std::move(residuals), max_clip, hj.diagnostics, fp.diagnostics};
    log::info("solve_mfg: eps = ", eps, " converged in ", sol.iterations, " iterations");
    stages.push_back(std::move(sol));
  }
  return stages;
}

}  // namespace mfg
