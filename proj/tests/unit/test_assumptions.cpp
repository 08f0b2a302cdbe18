#include <doctest.h>

#include <cmath>

#include "mfg/assumptions.hpp"
#include "support.hpp"

using namespace mfg;
using testing::constant_poly;
using testing::mode_poly;

namespace {

SampleSpec small_spec() {
  SampleSpec s;
  s.n = 16;
  return s;
}

}  // namespace

TEST_CASE("unit coefficients with mu = 0.5 pass every check") {
  for (int d = 1; d <= 2; ++d) {
    const HamiltonianModel m(d, constant_poly(1.0), constant_poly(1.0), 0.5);
    const AssumptionReport r = check_assumptions(m, small_spec());
    CHECK(r.all_pass());
    CHECK_FALSE(r.quadratic_borderline);
    for (const char* id : {"A1", "A3", "A5", "A7", "A8", "A9", "magic"}) {
      INFO(id);
      const auto& v = r.verdict(id);
      CHECK(v.pass);
      for (const auto& [k, c] : v.constants) CHECK(std::isfinite(c));
    }
    CHECK(r.p_max == 50.0);
    CHECK(r.verdict("A3").constant("c") == 0.75);
  }
}

TEST_CASE("A7 constants for unit coefficients are admissible with c1 <= 1 <= c2") {
  const HamiltonianModel m(1, constant_poly(1.0), constant_poly(1.0), 0.5);
  const AssumptionReport r = check_assumptions(m, small_spec());
  const auto& v = r.verdict("A7");
  CHECK(v.pass);
  // (1+|p|^2)^((2+mu)/2) >= |p|^(2+mu), so the ratio over |p| >= 1 never drops below 1
  CHECK(v.constant("c1") >= 1.0 - 1e-12);
  CHECK(v.constant("c2") >= 1.0);
  CHECK(v.constant("C1") >= 0.0);
  // c1 = 1 with C1 = 0 is admissible on every sample
  for (double r0 = 1e-2; r0 <= 50.0; r0 *= 1.1) {
    const double H = m.H(1.0, 1.0, {r0, 0, 0});
    CHECK(H - std::pow(r0, 2.5) >= 0.0);
  }
}

TEST_CASE("negative weight fails A1 and A7 with a witness") {
  const HamiltonianModel m(1, mode_poly(0.2, 1, 0.5, 0.0), constant_poly(2.0), 0.5);
  const AssumptionReport r = check_assumptions(m, small_spec());
  CHECK_FALSE(r.all_pass());
  for (const char* id : {"A1", "A7"}) {
    INFO(id);
    const auto& v = r.verdict(id);
    CHECK_FALSE(v.pass);
    REQUIRE(v.worst.has_value());
    // the witness sits where a < 0
    CHECK(m.a().value(v.worst->x) < 0.0);
  }
}

TEST_CASE("mu = 0 passes but is flagged as the quadratic borderline") {
  const HamiltonianModel m(1, constant_poly(1.0), constant_poly(1.0), 0.0);
  const AssumptionReport r = check_assumptions(m, small_spec());
  CHECK(r.quadratic_borderline);
  CHECK(r.all_pass());
  CHECK(r.verdict("A7").note.find("borderline") != std::string::npos);
}

TEST_CASE("fitted constants dominate the sampled ratios") {
  const HamiltonianModel m(1, mode_poly(1.0, 1, 0.5, 0.0), mode_poly(1.0, 1, 0.0, 0.5), 0.5);
  const SampleSpec spec = small_spec();
  const AssumptionReport r = check_assumptions(m, spec);
  REQUIRE(r.all_pass());
  const double C3 = r.verdict("A3").constant("C");
  const double c3 = r.verdict("A3").constant("c");
  const double C8 = r.verdict("A8").constant("C");
  const double c1 = r.verdict("A7").constant("c1"), C1 = r.verdict("A7").constant("C1");
  const double c2 = r.verdict("A7").constant("c2"), C2 = r.verdict("A7").constant("C2");
  const TorusGrid g(1, spec.n);
  for (std::size_t node = 0; node < g.size(); ++node) {
    const Vec3 x = g.position(node);
    const PointData c = m.at(x);
    for (double p0 : {0.0, 0.01, 0.3, 1.0, 4.0, 17.0, 50.0}) {
      const Vec3 p{p0, 0, 0};
      const double H = m.H(c.a, c.V, p);
      const double tol = 1e-10 * H;
      CHECK(m.Lhat(c.a, c.V, p) >= c3 * H - C3 - tol);
      const Vec3 b = m.DpH(c.a, p);
      CHECK(dot(b, b, 1) <= C8 * (std::pow(p0, 0.5) * H + 1.0) * (1 + 1e-12));
      CHECK(H >= c1 * std::pow(p0, 2.5) + C1 - tol);
      CHECK(H <= c2 * std::pow(p0, 2.5) + C2 + tol);
    }
  }
}

TEST_CASE("the checker is deterministic") {
  const HamiltonianModel m(2, mode_poly(1.0, 1, 0.3, 0.0), constant_poly(1.0), 0.7);
  const AssumptionReport a = check_assumptions(m, small_spec());
  const AssumptionReport b = check_assumptions(m, small_spec());
  REQUIRE(a.verdicts.size() == b.verdicts.size());
  for (std::size_t i = 0; i < a.verdicts.size(); ++i)
    CHECK(a.verdicts[i].constants == b.verdicts[i].constants);
}
