#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "mfg/hjb.hpp"
#include "support.hpp"

using namespace mfg;
using testing::constant_poly;
using testing::mode_poly;
using testing::pi;

namespace {

FieldHistory zero_source(const TorusGrid& g, const TimeGrid& t) { return FieldHistory(g, t); }

// u*(t, x) = A cos(2 pi x) e^{-t} solves -u_t - u'' + H(x, u') = f with
// f = u* + 4 pi^2 u* + H(x, u*').
double manufactured_error(int n, double T) {
  const double A = 0.2;
  const TorusGrid g(1, n);
  const int nt = static_cast<int>(std::lround(4.0 * T * n * n));
  const TimeGrid tg(T, nt);
  const auto model = HamiltonianModel::validated(1, mode_poly(1.0, 1, 0.5, 0.0),
                                                 mode_poly(1.0, 1, 0.0, 0.5), 0.5);
  FieldHistory f(g, tg);
  for (int k = 0; k <= nt; ++k) {
    const double e = std::exp(-tg.time(k));
    f.at(k) = ScalarField::from_function(g, [&](const Vec3& x) {
      const double u = A * std::cos(2 * pi * x[0]) * e;
      const Vec3 du{-2 * pi * A * std::sin(2 * pi * x[0]) * e, 0, 0};
      return u + 4 * pi * pi * u + eval_H(model, x, du);
    });
  }
  const ScalarField uT = ScalarField::from_function(
      g, [&](const Vec3& x) { return A * std::cos(2 * pi * x[0]) * std::exp(-T); });
  const HJBSolve s = solve_hjb(model, g, tg, uT, f);
  double err = 0.0;
  for (int k = 0; k <= nt; ++k) {
    const double e = std::exp(-tg.time(k));
    const ScalarField exact =
        ScalarField::from_function(g, [&](const Vec3& x) { return A * std::cos(2 * pi * x[0]) * e; });
    err = std::max(err, testing::max_diff(s.u.at(k), exact));
  }
  return err;
}

}  // namespace

TEST_CASE("pure potential: u = u_T - c0 (T - t)") {
  const TorusGrid g(2, 8);
  const TimeGrid tg(0.5, 20);
  const HamiltonianModel model(2, constant_poly(0.0), constant_poly(1.5), 0.5);
  const HJBSolve s = solve_hjb(model, g, tg, ScalarField(g, 0.25), zero_source(g, tg));
  for (int k = 0; k <= tg.steps(); ++k) {
    const double expect = 0.25 - 1.5 * (0.5 - tg.time(k));
    for (double v : s.u.at(k).values()) CHECK(std::abs(v - expect) <= 1e-12);
  }
}

TEST_CASE("constant terminal data with unit coefficients: u = K - 2 (T - t)") {
  const TorusGrid g(1, 32);
  const TimeGrid tg(1.0, 100);
  const auto model = HamiltonianModel::validated(1, constant_poly(1.0), constant_poly(1.0), 0.5);
  for (auto stab : {Stabilization::central, Stabilization::upwind}) {
    HJBConfig cfg;
    cfg.stabilization = stab;
    const HJBSolve s = solve_hjb(model, g, tg, ScalarField(g, 3.0), zero_source(g, tg), cfg);
    for (int k = 0; k <= tg.steps(); ++k)
      for (double v : s.u.at(k).values()) CHECK(std::abs(v - (3.0 - 2.0 * (1.0 - tg.time(k)))) <= 1e-12);
    CHECK(s.diagnostics.cfl_violations == 0);
  }
}

TEST_CASE("manufactured solution converges at second order in h with dt ~ h^2") {
  const double e16 = manufactured_error(16, 0.1);
  const double e32 = manufactured_error(32, 0.1);
  const double e64 = manufactured_error(64, 0.1);
  MESSAGE("errors " << e16 << " " << e32 << " " << e64);
  CHECK(e32 < e16);
  CHECK(e64 < e32);
  const double order = std::log2(e32 / e64);
  CHECK(order >= 1.7);
  CHECK(order <= 2.3);
}

TEST_CASE("upwind scheme preserves ordering of terminal data") {
  std::mt19937_64 rng(21);
  const TorusGrid g(1, 32);
  const TimeGrid tg(0.2, 200);
  const auto model = HamiltonianModel::validated(1, mode_poly(1.0, 1, 0.3, 0.0), constant_poly(1.0), 0.5);
  HJBConfig cfg;
  cfg.stabilization = Stabilization::upwind;
  for (int trial = 0; trial < 5; ++trial) {
    const ScalarField lo = testing::random_field(g, rng, -0.05, 0.05);
    ScalarField hi = lo;
    const ScalarField bump = testing::random_field(g, rng, 0.0, 0.05);
    for (std::size_t i = 0; i < g.size(); ++i) hi[i] += bump[i];
    const HJBSolve a = solve_hjb(model, g, tg, lo, zero_source(g, tg), cfg);
    const HJBSolve b = solve_hjb(model, g, tg, hi, zero_source(g, tg), cfg);
    REQUIRE(a.diagnostics.cfl_violations == 0);
    for (int k = 0; k <= tg.steps(); ++k)
      for (std::size_t i = 0; i < g.size(); ++i) CHECK(a.u.at(k)[i] <= b.u.at(k)[i] + 1e-14);
  }
}

TEST_CASE("step-size violations warn or throw") {
  const TorusGrid g(1, 32);
  const TimeGrid tg(0.1, 10);
  const auto model = HamiltonianModel::validated(1, constant_poly(1.0), constant_poly(1.0), 0.5);
  const ScalarField uT = mode_poly(0.0, 1, 1.0, 0.0).sample(g);
  HJBConfig cfg;
  cfg.strict = true;
  try {
    solve_hjb(model, g, tg, uT, zero_source(g, tg), cfg);
    FAIL("expected StepSizeError");
  } catch (const StepSizeError& e) {
    CHECK(e.step() == 9);
    CHECK(e.cfl() > 0.5);
    CHECK(std::string(e.what()).find("CFL") != std::string::npos);
  }
  const double limit = hjb_step_limit(model, sample_coefficients(model, g), uT);
  CHECK(limit < tg.dt());
  CHECK(limit > 0.0);
}

TEST_CASE("mismatched inputs are rejected") {
  const TorusGrid g(1, 16), other(1, 8);
  const TimeGrid tg(0.1, 10);
  const auto model = HamiltonianModel::validated(1, constant_poly(1.0), constant_poly(1.0), 0.5);
  CHECK_THROWS_AS(solve_hjb(model, g, tg, ScalarField(other), zero_source(g, tg)), GridMismatchError);
  CHECK_THROWS_AS(solve_hjb(model, g, tg, ScalarField(g), FieldHistory(g, TimeGrid(0.1, 5))),
                  GridMismatchError);
}

TEST_CASE("history utilities") {
  const TorusGrid g(1, 20);
  const TimeGrid tg(1.0, 4);
  const ScalarField s = ScalarField::from_function(g, [](const Vec3& x) { return std::sin(2 * pi * x[0]); });
  FieldHistory u(g, tg, s);
  const double h = g.spacing();
  CHECK(lipschitz_norm(u) == doctest::Approx(std::sin(2 * pi * h) / h).epsilon(1e-14));
  u.at(2) = ScalarField(g, 0.0);
  CHECK(lipschitz_norm(u, 2, 2) == 0.0);
  CHECK_THROWS_AS(u.at(5), std::out_of_range);
  CHECK_THROWS_AS(FieldHistory(g, tg, 2).at(1), std::out_of_range);
  CHECK(FieldHistory(g, tg, 2).frame_count() == 3);
  CHECK(time_trapezoid({1.0, 2.0, 3.0}, 0.5, 0, 2) == 2.0);
  CHECK(time_trapezoid({1.0, 2.0, 3.0}, 0.5, 1, 1) == 0.0);
}
