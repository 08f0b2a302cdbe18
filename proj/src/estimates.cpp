#include "mfg/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <ostream>
#include <stdexcept>

#include "mfg/io.hpp"

namespace mfg {
namespace {

constexpr double g_prime_floor = 1e-14;

ScalarField smooth(const ScalarField& f, const Mollifier* moll) {
  return moll ? mollify(f, *moll) : f;
}

// Lhat(x, grad u) at every node.
ScalarField lhat_field(const HamiltonianModel& model, const NodalCoefficients& c,
                       const ScalarField& u) {
  const VectorField grad = gradient_central(u);
  ScalarField out(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = model.Lhat(c.a[i], c.V[i], grad.vec(i));
  return out;
}

std::size_t probe_node(const TorusGrid& g, const Vec3& x0) { return g.nearest_node(x0); }

int probe_time(const TimeGrid& t, double tau) {
  if (!(tau >= 0.0 && tau < t.horizon()))
    throw std::invalid_argument("probe time tau must lie in [0, T)");
  const int k = t.nearest_node(tau);
  if (k >= t.steps()) throw std::invalid_argument("probe time tau rounds to T");
  return k;
}

// Shared engine for the adjoint pairing
//   int_tau^T <w^k, zeta^k> dt + <u_T, zeta(T)>
// where w^k is built per frame by `integrand`.
template <typename F>
double adjoint_pairing(const FieldHistory& zeta, const FieldHistory& u, F integrand) {
  const TimeGrid& t = zeta.time_grid();
  std::vector<double> series(static_cast<std::size_t>(t.steps() + 1), 0.0);
  for (int k = zeta.first_index(); k <= t.steps(); ++k)
    series[static_cast<std::size_t>(k)] = inner(integrand(k), zeta.at(k));
  return time_trapezoid(series, t.dt(), zeta.first_index(), t.steps()) +
         inner(u.at(t.steps()), zeta.at(t.steps()));
}

}  // namespace

double default_nu(int d) { return (2.0 * d - 1.0) / (2.0 * d); }

double integrability_threshold(int d, double mu) {
  const double s = d * (1.0 + mu);
  return s > 2.0 ? s / (s - 2.0) : std::numeric_limits<double>::infinity();
}

double DualityTerms::residual() const { return std::abs(lhs - rhs); }

double first_order_quantity(const MFGSolution& sol, const HamiltonianModel& model,
                            const CouplingPower& coupling, const Mollifier* moll) {
  const TorusGrid& g = sol.u.grid();
  const TimeGrid& t = sol.u.time_grid();
  const NodalCoefficients c = sample_coefficients(model, g);
  std::vector<double> series(static_cast<std::size_t>(t.steps() + 1));
  for (int k = 0; k <= t.steps(); ++k) {
    const ScalarField H = hamiltonian_field(model, c, sol.u.at(k));
    const ScalarField em = smooth(sol.m.at(k), moll);
    double G = 0.0;
    for (std::size_t i = 0; i < em.size(); ++i) G += coupling.G(std::max(em[i], 0.0));
    series[static_cast<std::size_t>(k)] = inner(H, sol.m.at(k)) + G * g.cell_volume();
  }
  return time_trapezoid(series, t.dt(), 0, t.steps());
}

SecondOrderResult second_order_quantity(const MFGSolution& sol, const HamiltonianModel& model,
                                        const CouplingPower& coupling, const Mollifier* moll) {
  const TorusGrid& g = sol.u.grid();
  const TimeGrid& t = sol.u.time_grid();
  const int d = g.dim();
  const NodalCoefficients c = sample_coefficients(model, g);
  SecondOrderResult out;
  std::vector<double> series(static_cast<std::size_t>(t.steps() + 1));
  VectorField grad_u(g), grad_em(g);
  for (int k = 0; k <= t.steps(); ++k) {
    const ScalarField& u = sol.u.at(k);
    const ScalarField& m = sol.m.at(k);
    const ScalarField em = smooth(m, moll);
    gradient_central(u, grad_u);
    gradient_central(em, grad_em);
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      double z = em[i];
      if (z < g_prime_floor && !coupling.constant && coupling.alpha < 1.0) {
        z = g_prime_floor;
        out.floored = true;
      }
      const Vec3 ge = grad_em.vec(i);
      const double first = coupling.dg(std::max(z, 0.0)) * dot(ge, ge, d);
      const Mat3 A = model.DppH(c.a[i], grad_u.vec(i));
      const Mat3 D2 = hessian_at(u, i);
      // tr(A D2 D2)
      double tr = 0.0;
      for (int p = 0; p < d; ++p)
        for (int q = 0; q < d; ++q) {
          double d2d2 = 0.0;
          for (int r = 0; r < d; ++r) d2d2 += D2[q][r] * D2[r][p];
          tr += A[p][q] * d2d2;
        }
      acc += first + tr * m[i];
    }
    series[static_cast<std::size_t>(k)] = acc * g.cell_volume();
  }
  out.value = time_trapezoid(series, t.dt(), 0, t.steps());
  return out;
}

double mhjr_quantity(const MFGSolution& sol, const CouplingPower& coupling, const Mollifier* moll,
                     std::optional<double> surrogate_2star) {
  const int d = sol.m.grid().dim();
  double two_star = 0.0;
  if (surrogate_2star) {
    two_star = *surrogate_2star;
    if (!(two_star > 2.0)) throw std::invalid_argument("mhjr_quantity: surrogate 2* must exceed 2");
  } else if (d > 2) {
    two_star = 2.0 * d / (d - 2.0);
  } else {
    throw std::invalid_argument(
        "mhjr_quantity: the Sobolev exponent 2* = 2d/(d-2) is undefined for d <= 2; supply a "
        "surrogate exponent");
  }
  const double q = 0.5 * two_star * (coupling.alpha + 1.0);
  const TimeGrid& t = sol.m.time_grid();
  std::vector<double> series(static_cast<std::size_t>(t.steps() + 1));
  for (int k = 0; k <= t.steps(); ++k)
    series[static_cast<std::size_t>(k)] =
        std::pow(lp_norm(smooth(sol.m.at(k), moll), q), coupling.alpha + 1.0);
  return time_trapezoid(series, t.dt(), 0, t.steps());
}

DualityTerms duality_terms(const MFGSolution& sol, const HamiltonianModel& model,
                           const CouplingPower& coupling, const Mollifier* moll) {
  const TorusGrid& g = sol.u.grid();
  const TimeGrid& t = sol.u.time_grid();
  const NodalCoefficients c = sample_coefficients(model, g);
  std::vector<double> series(static_cast<std::size_t>(t.steps() + 1));
  for (int k = 0; k <= t.steps(); ++k) {
    ScalarField w = lhat_field(model, c, sol.u.at(k));
    const ScalarField gm = coupling_g_eps(sol.m.at(k), coupling, moll).value;
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += gm[i];
    series[static_cast<std::size_t>(k)] = inner(w, sol.m.at(k));
  }
  DualityTerms out;
  out.lhs = inner(sol.u.at(0), sol.m.at(0)) - inner(sol.u.at(t.steps()), sol.m.at(t.steps()));
  out.rhs = time_trapezoid(series, t.dt(), 0, t.steps());
  return out;
}

double duality_residual(const MFGSolution& sol, const HamiltonianModel& model,
                        const CouplingPower& coupling, const Mollifier* moll) {
  return duality_terms(sol, model, coupling, moll).residual();
}

LaxHopfResult lax_hopf_check(const MFGSolution& sol, const HamiltonianModel& model,
                             const CouplingPower& coupling, const Mollifier* moll, DriftMode mode,
                             const Vec3& x0, double tau, const FPConfig& fp) {
  const TorusGrid& g = sol.u.grid();
  const TimeGrid& t = sol.u.time_grid();
  const std::size_t node = probe_node(g, x0);
  const int k0 = probe_time(t, tau);
  const NodalCoefficients c = sample_coefficients(model, g);

  // The controlled density solves zeta_t + div(b zeta) = Lap zeta; in the
  // solve_fp convention the drift field is -b, which for the optimal
  // control b = -D_p H is D_p H itself.
  DriftHistory drift;
  if (mode == DriftMode::optimal) {
    drift = hamiltonian_drift(model, sol.u);
  } else {
    drift.assign(static_cast<std::size_t>(t.steps() + 1), VectorField(g));
  }
  const FPSolve zeta = solve_adjoint(g, t, k0, node, drift, fp);

  ScalarField L0(g);
  if (mode == DriftMode::zero) {
    const Vec3 zero{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < g.size(); ++i) L0[i] = model.L(c.a[i], c.V[i], zero, default_legendre_pmax);
  }
  LaxHopfResult out;
  out.lhs = sol.u.at(k0)[node];
  out.rhs = adjoint_pairing(zeta.m, sol.u, [&](int k) {
    ScalarField w = mode == DriftMode::optimal ? lhat_field(model, c, sol.u.at(k)) : L0;
    const ScalarField gm = coupling_g_eps(sol.m.at(k), coupling, moll).value;
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += gm[i];
    return w;
  });
  return out;
}

RepresentationResult representation_check(const MFGSolution& sol, const HamiltonianModel& model,
                                          const CouplingPower& coupling, const Mollifier* moll,
                                          const Vec3& x0, double tau, double nu,
                                          const FPConfig& fp) {
  const TorusGrid& g = sol.u.grid();
  const TimeGrid& t = sol.u.time_grid();
  const int d = g.dim();
  RepresentationResult out;
  out.node = probe_node(g, x0);
  out.tau_index = probe_time(t, tau);
  const NodalCoefficients c = sample_coefficients(model, g);
  const FPSolve rho = solve_adjoint(g, t, out.tau_index, out.node, hamiltonian_drift(model, sol.u), fp);

  std::vector<double> h_series(static_cast<std::size_t>(t.steps() + 1), 0.0);
  out.lhs = sol.u.at(out.tau_index)[out.node];
  out.rhs = adjoint_pairing(rho.m, sol.u, [&](int k) {
    const ScalarField& u = sol.u.at(k);
    const VectorField grad = gradient_central(u);
    ScalarField w(g);
    ScalarField H(g);
    const ScalarField gm = coupling_g_eps(sol.m.at(k), coupling, moll).value;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Vec3 p = grad.vec(i);
      H[i] = model.H(c.a[i], c.V[i], p);
      w[i] = dot(model.DpH(c.a[i], p), p, d) - H[i] + gm[i];
    }
    h_series[static_cast<std::size_t>(k)] = inner(H, rho.m.at(k));
    return w;
  });
  out.error = std::abs(out.lhs - out.rhs);
  out.adjoint_H_integral = time_trapezoid(h_series, t.dt(), out.tau_index, t.steps());
  out.adjoint_grad_nu_integral = rho_grad_power_integral(rho.m, nu);
  return out;
}

double NormSeries::max_of(const std::vector<double>& s) {
  return s.empty() ? 0.0 : *std::max_element(s.begin(), s.end());
}

NormSeries norm_series(const MFGSolution& sol, const HamiltonianModel& model,
                       const std::vector<double>& r_list, const std::vector<double>& p_list,
                       const CouplingPower& coupling, const Mollifier* moll) {
  for (double r : r_list)
    if (!(r >= 1.0)) throw std::invalid_argument("norm_series: every r must be at least 1");
  for (double p : p_list)
    if (!(p >= 1.0)) throw std::invalid_argument("norm_series: every p must be at least 1");
  const TorusGrid& g = sol.u.grid();
  const TimeGrid& t = sol.u.time_grid();
  NormSeries s;
  s.r_list = r_list;
  s.p_list = p_list;
  const double thr = integrability_threshold(g.dim(), model.mu());
  for (double r : r_list) s.r_at_or_above_threshold.push_back(r >= thr);
  s.m_lr.assign(r_list.size(), {});
  s.g_lp.assign(p_list.size(), {});
  VectorField grad(g);
  for (int k = 0; k <= t.steps(); ++k) {
    const ScalarField& m = sol.m.at(k);
    const ScalarField& u = sol.u.at(k);
    s.time.push_back(t.time(k));
    s.mass.push_back(mass(m));
    s.min_m.push_back(min_value(m));
    s.u_sup.push_back(max_abs(u));
    gradient_central(u, grad);
    s.du_sup.push_back(max_norm(grad));
    for (std::size_t j = 0; j < r_list.size(); ++j) s.m_lr[j].push_back(lp_norm(m, r_list[j]));
    const ScalarField gm = coupling_g_eps(m, coupling, moll).value;
    for (std::size_t j = 0; j < p_list.size(); ++j) s.g_lp[j].push_back(lp_norm(gm, p_list[j]));
  }
  return s;
}

std::vector<std::pair<std::string, double>> EstimateReport::scalars() const {
  std::vector<std::pair<std::string, double>> out{
      {"epsilon", epsilon},
      {"first_order_Q1", first_order_Q1},
      {"second_order_Q2", second_order_Q2},
      {"second_order_floored", second_order_floored ? 1.0 : 0.0},
  };
  if (mhjr_integral) out.emplace_back("mhjr_integral", *mhjr_integral);
  out.emplace_back("duality_residual", duality_residual);
  out.emplace_back("nu", nu);
  out.emplace_back("a3_constant", a3_constant);
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const auto& p = probes[i];
    const std::string tag = "probe" + std::to_string(i) + ".";
    out.emplace_back(tag + "x0", p.probe.x0[0]);
    out.emplace_back(tag + "y0", p.probe.x0[1]);
    out.emplace_back(tag + "z0", p.probe.x0[2]);
    out.emplace_back(tag + "tau", p.probe.tau);
    out.emplace_back(tag + "representation_error", p.representation.error);
    out.emplace_back(tag + "u_at_probe", p.representation.lhs);
    out.emplace_back(tag + "adjoint_H_integral", p.representation.adjoint_H_integral);
    out.emplace_back(tag + "adjoint_grad_nu_integral", p.representation.adjoint_grad_nu_integral);
    out.emplace_back(tag + "laxhopf_gap_zero", p.lax_hopf_zero.gap());
    out.emplace_back(tag + "laxhopf_gap_optimal", p.lax_hopf_optimal.gap());
    const double scale = 1.0 + NormSeries::max_of(series.u_sup);
    out.emplace_back(tag + "adjoint_H_ratio", p.representation.adjoint_H_integral / scale);
  }
  return out;
}

EstimateReport build_report(const MFGSolution& sol, const HamiltonianModel& model,
                            const CouplingPower& coupling, const EstimateConfig& cfg,
                            double a3_constant) {
  const TorusGrid& g = sol.u.grid();
  std::unique_ptr<Mollifier> moll;
  if (sol.epsilon > 0.0) moll = std::make_unique<Mollifier>(g, sol.epsilon);
  const Mollifier* mp = moll.get();

  EstimateReport r;
  r.epsilon = sol.epsilon;
  r.a3_constant = a3_constant;
  r.nu = cfg.nu.value_or(default_nu(g.dim()));
  r.series = norm_series(sol, model, cfg.r_list, cfg.p_list, coupling, mp);
  r.first_order_Q1 = first_order_quantity(sol, model, coupling, mp);
  const SecondOrderResult q2 = second_order_quantity(sol, model, coupling, mp);
  r.second_order_Q2 = q2.value;
  r.second_order_floored = q2.floored;
  if (g.dim() > 2 || cfg.mhjr_exponent)
    r.mhjr_integral = mhjr_quantity(sol, coupling, mp, cfg.mhjr_exponent);
  r.duality_residual = duality_residual(sol, model, coupling, mp);
  for (const auto& probe : cfg.probes) {
    ProbeReport p;
    p.probe = probe;
    p.representation = representation_check(sol, model, coupling, mp, probe.x0, probe.tau, r.nu, cfg.fp);
    p.lax_hopf_zero = lax_hopf_check(sol, model, coupling, mp, DriftMode::zero, probe.x0, probe.tau, cfg.fp);
    p.lax_hopf_optimal =
        lax_hopf_check(sol, model, coupling, mp, DriftMode::optimal, probe.x0, probe.tau, cfg.fp);
    r.probes.push_back(p);
  }
  return r;
}

void write_report_csv(const EstimateReport& report, std::ostream& os) {
  const auto& s = report.series;
  std::vector<std::string> header{"k", "t", "mass", "min_m", "u_sup", "Du_sup"};
  for (double r : s.r_list) header.push_back("m_L" + format_double(r));
  for (double p : s.p_list) header.push_back("g_L" + format_double(p));
  os << csv_row(header);
  for (std::size_t k = 0; k < s.time.size(); ++k) {
    std::vector<std::string> row{std::to_string(k), format_double(s.time[k]),
                                 format_double(s.mass[k]), format_double(s.min_m[k]),
                                 format_double(s.u_sup[k]), format_double(s.du_sup[k])};
    for (const auto& col : s.m_lr) row.push_back(format_double(col[k]));
    for (const auto& col : s.g_lp) row.push_back(format_double(col[k]));
    os << csv_row(row);
  }
  os << "\n" << csv_row({"key", "value"});
  for (const auto& [k, v] : report.scalars()) os << csv_row({k, format_double(v)});
  for (std::size_t j = 0; j < s.r_list.size(); ++j)
    if (s.r_at_or_above_threshold[j])
      os << csv_row({"r_at_or_above_threshold", format_double(s.r_list[j])});
}

}  // namespace mfg
