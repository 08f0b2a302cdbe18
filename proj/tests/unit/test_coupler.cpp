#include <doctest.h>

#include <cmath>

#include "mfg/coupler.hpp"
#include "support.hpp"

using namespace mfg;
using testing::constant_poly;
using testing::mode_poly;
using testing::pi;

namespace {

// h^d sum_j eta(x_i - x_j) f(x_j) by brute force over node pairs
ScalarField direct_convolve(const ScalarField& f, const ScalarField& kernel) {
  const TorusGrid& g = f.grid();
  const int n = g.points_per_axis();
  ScalarField out(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
      std::array<int, 3> c{0, 0, 0};
      for (int a = 0; a < g.dim(); ++a) c[a] = ((g.coord(i, a) - g.coord(j, a)) % n + n) % n;
      s += kernel[g.node_at(c)] * f[j];
    }
    out[i] = s * g.cell_volume();
  }
  return out;
}

struct Problem {
  TorusGrid grid{1, 32};
  TimeGrid time{0.25, 50};
  HamiltonianModel model = HamiltonianModel::validated(1, mode_poly(1.0, 1, 0.5, 0.0),
                                                       mode_poly(1.0, 1, 0.0, 0.5), 0.5);
  ScalarField u_T = mode_poly(0.0, 1, 0.1, 0.0).sample(grid);
  ScalarField m_0 = mode_poly(1.0, 1, 0.5, 0.0).sample(grid);
};

}  // namespace

TEST_CASE("coupling of the uniform density is one") {
  const TorusGrid g(2, 16);
  for (double eps : {0.05, 0.1, 0.2})
    for (double alpha : {0.3, 1.0, 2.5}) {
      const Mollifier moll(g, eps);
      const ScalarField out = coupling_g_eps(ScalarField(g, 1.0), alpha, moll);
      for (double v : out.values()) CHECK(std::abs(v - 1.0) <= 1e-12);
    }
}

TEST_CASE("linear coupling equals double mollification") {
  std::mt19937_64 rng(41);
  const TorusGrid g(2, 16);
  const Mollifier moll(g, 0.08);
  const ScalarField m = testing::random_field(g, rng, 0.0, 2.0);
  const ScalarField oracle = direct_convolve(direct_convolve(m, moll.kernel()), moll.kernel());
  for (auto path : {ConvolutionPath::direct, ConvolutionPath::spectral}) {
    const CouplingResult r = coupling_g_eps(m, CouplingPower(1.0), &moll, path);
    CHECK(testing::max_diff(r.value, oracle) <= 1e-10);
    CHECK(r.clip == 0.0);
  }
}

TEST_CASE("tiny epsilon reduces to the pointwise power") {
  std::mt19937_64 rng(42);
  const TorusGrid g(1, 64);
  const Mollifier moll(g, 1e-3 * g.spacing());
  const ScalarField m = testing::random_field(g, rng, 0.1, 3.0);
  const ScalarField out = coupling_g_eps(m, 0.7, moll);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(out[i] - std::pow(m[i], 0.7)) <= 1e-12);
  const CouplingResult plain = coupling_g_eps(m, CouplingPower(0.7), nullptr);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(plain.value[i] == std::pow(m[i], 0.7));
}

TEST_CASE("coupling is monotone and clips negative parts") {
  std::mt19937_64 rng(43);
  const TorusGrid g(1, 64);
  const Mollifier moll(g, 0.05);
  for (int trial = 0; trial < 10; ++trial) {
    const ScalarField lo = testing::random_field(g, rng, 0.0, 1.0);
    ScalarField hi = lo;
    const ScalarField bump = testing::random_field(g, rng, 0.0, 1.0);
    for (std::size_t i = 0; i < g.size(); ++i) hi[i] += bump[i];
    const ScalarField a = coupling_g_eps(lo, 0.5, moll);
    const ScalarField b = coupling_g_eps(hi, 0.5, moll);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(a[i] <= b[i] + 1e-15);
  }
  ScalarField neg(g, 1.0);
  neg[3] = -0.01;
  const CouplingResult r = coupling_g_eps(neg, CouplingPower(2.0), &moll);
  CHECK(r.clip == 0.01);
  CHECK(min_value(r.value) >= 0.0);
}

TEST_CASE("coupling power flags exponents at or above the critical value") {
  CHECK(CouplingPower(2.0).above_critical(2, 0.5));
  CHECK_FALSE(CouplingPower(1.99).above_critical(2, 0.5));
  CHECK_FALSE(CouplingPower(100.0).above_critical(1, 0.5));
  CHECK(CouplingPower(0.8).above_critical(3, 0.5));
  CHECK(CouplingPower(0.5).G(4.0) == doctest::Approx(16.0 / 3.0));
  CHECK(CouplingPower(0.5, 1.0).g(7.0) == 1.0);
  CHECK_THROWS_AS(CouplingPower(0.0), std::invalid_argument);
}

TEST_CASE("decoupled system converges on the second iteration") {
  const Problem p;
  FixpointConfig cfg;
  cfg.damping = 1.0;
  cfg.epsilon_schedule = {0.1};
  const CouplingPower hook(0.5, 1.0);
  const auto stages = solve_mfg(p.model, p.grid, p.time, p.u_T, p.m_0, hook, cfg);
  REQUIRE(stages.size() == 1);
  CHECK(stages[0].iterations == 2);
  CHECK(stages[0].residual_history[1] == 0.0);
  const HJBSolve hj = solve_hjb(p.model, p.grid, p.time, p.u_T, FieldHistory(p.grid, p.time, ScalarField(p.grid, 1.0)));
  const FPSolve fp = solve_fp(p.grid, p.time, p.m_0, hamiltonian_drift(p.model, hj.u));
  // g = 1 passes through the mollifier, so agreement is to rounding
  for (int k = 0; k <= p.time.steps(); ++k) {
    CHECK(testing::max_diff(stages[0].u.at(k), hj.u.at(k)) <= 1e-12);
    CHECK(testing::max_diff(stages[0].m.at(k), fp.m.at(k)) <= 1e-12);
  }
}

TEST_CASE("data even about one half give even solutions") {
  const TorusGrid g(1, 32);
  const TimeGrid t(0.25, 50);
  const auto model = HamiltonianModel::validated(1, mode_poly(1.0, 1, 0.5, 0.0),
                                                 mode_poly(1.0, 2, 0.3, 0.0), 0.5);
  const ScalarField uT = mode_poly(0.0, 1, 0.1, 0.0).sample(g);
  const ScalarField m0 = mode_poly(1.0, 1, 0.5, 0.0).sample(g);
  FixpointConfig cfg;
  cfg.epsilon_schedule = {0.1};
  const auto stages = solve_mfg(model, g, t, uT, m0, CouplingPower(0.5), cfg);
  const auto& s = stages[0];
  for (int k = 0; k <= t.steps(); ++k)
    for (int i = 1; i < 32; ++i) {
      CHECK(std::abs(s.u.at(k)[i] - s.u.at(k)[32 - i]) <= 1e-12);
      CHECK(std::abs(s.m.at(k)[i] - s.m.at(k)[32 - i]) <= 1e-12);
    }
}

TEST_CASE("iteration limit raises a convergence error with the history") {
  const Problem p;
  FixpointConfig cfg;
  cfg.max_iter = 2;
  cfg.tol = 1e-14;
  try {
    solve_mfg(p.model, p.grid, p.time, p.u_T, p.m_0, CouplingPower(0.5), cfg);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    REQUIRE(e.residual_history().size() == 2);
    for (double r : e.residual_history()) CHECK(std::isfinite(r));
  }
  cfg = FixpointConfig{};
  cfg.epsilon_schedule = {0.1, 0.1};
  CHECK_THROWS_AS(solve_mfg(p.model, p.grid, p.time, p.u_T, p.m_0, CouplingPower(0.5), cfg),
                  std::invalid_argument);
  cfg.epsilon_schedule = {0.1};
  cfg.damping = 0.0;
  CHECK_THROWS_AS(solve_mfg(p.model, p.grid, p.time, p.u_T, p.m_0, CouplingPower(0.5), cfg),
                  std::invalid_argument);
}

TEST_CASE("every stage is a consistent pair of probability densities") {
  const Problem p;
  FixpointConfig warm;
  FixpointConfig cold;
  cold.warm_start = false;
  const auto a = solve_mfg(p.model, p.grid, p.time, p.u_T, p.m_0, CouplingPower(0.5), warm);
  const auto b = solve_mfg(p.model, p.grid, p.time, p.u_T, p.m_0, CouplingPower(0.5), cold);
  REQUIRE(a.size() == 3);
  REQUIRE(b.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(a[i].epsilon == warm.epsilon_schedule[i]);
    CHECK(a[i].residual_history.back() < warm.tol);
    CHECK(a[i].iterations <= b[i].iterations);
    for (const auto& f : a[i].m.frames()) CHECK(std::abs(mass(f) - 1.0) <= 1e-8);
  }
  CHECK(a[0].iterations == b[0].iterations);
}
