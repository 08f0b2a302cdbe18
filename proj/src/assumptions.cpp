#include "mfg/assumptions.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace mfg {
namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
// Log-log slope over the outer decade above which a ratio is treated as
// unbounded in |p|.
constexpr double growth_slope_limit = 0.1;

struct Sample {
  Vec3 x;
  Vec3 p;
  int radius_index;
};

double frob2(const Mat3& m, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) s += m[i][j] * m[i][j];
  return s;
}

Mat3 matmul(const Mat3& a, const Mat3& b, int d) {
  Mat3 c{};
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

double trace(const Mat3& a, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) s += a[i][i];
  return s;
}

double min_eigenvalue(const Mat3& m, int d) {
  Eigen::MatrixXd a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = m[i][j];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

/// Supremum of a sampled quantity with arg-max, per-radius maxima for the
/// growth test, and the first sample that admits no constant at all.
class SupFit {
 public:
  explicit SupFit(std::size_t radii) : per_radius_(radii, -inf) {}

  void add(double value, const Sample& s) {
    if (!std::isfinite(value)) {
      reject(s, value, "non-finite sample");
      return;
    }
    if (value > sup_) {
      sup_ = value;
      arg_ = Witness{s.x, s.p, value};
    }
    auto& r = per_radius_[static_cast<std::size_t>(s.radius_index)];
    r = std::max(r, value);
  }

  void reject(const Sample& s, double value, const std::string& reason) {
    if (bad_) return;
    bad_ = Witness{s.x, s.p, value};
    reason_ = reason;
  }

  double sup() const { return sup_; }
  bool infeasible() const { return bad_.has_value(); }
  const std::optional<Witness>& violation() const { return bad_; }
  const std::string& reason() const { return reason_; }
  const Witness& arg() const { return arg_; }

  /// Slope of log(max ratio) against log|p| between the outer and mid radii.
  double growth_slope(const std::vector<double>& radii, std::size_t mid) const {
    const std::size_t last = radii.size() - 1;
    const double top = per_radius_[last];
    const double low = per_radius_[mid];
    if (!(top > 0.0)) return -inf;
    if (!(low > 0.0)) return inf;
    return std::log(top / low) / std::log(radii[last] / radii[mid]);
  }

 private:
  double sup_ = -inf;
  Witness arg_{};
  std::vector<double> per_radius_;
  std::optional<Witness> bad_;
  std::string reason_;
};

AssumptionVerdict finish(std::string id, std::string statement, const SupFit& fit,
                         const std::string& constant_name, double constant,
                         const std::vector<double>& radii, std::size_t mid) {
  AssumptionVerdict v;
  v.id = std::move(id);
  v.statement = std::move(statement);
  v.constants.emplace_back(constant_name, constant);
  if (fit.infeasible()) {
    v.pass = false;
    v.worst = fit.violation();
    v.note = fit.reason();
    return v;
  }
  v.worst = fit.arg();
  const double slope = fit.growth_slope(radii, mid);
  if (slope > growth_slope_limit) {
    v.pass = false;
    v.note = "required constant grows with |p| (log-log slope " + std::to_string(slope) + ")";
  }
  return v;
}

// Finishing variant for checks with several fitted constants sharing one verdict.
void merge(AssumptionVerdict& into, const AssumptionVerdict& part) {
  into.constants.insert(into.constants.end(), part.constants.begin(), part.constants.end());
  if (!part.pass && into.pass) {
    into.pass = false;
    into.worst = part.worst;
    into.note = part.note;
  } else if (into.pass && !into.worst) {
    into.worst = part.worst;
  }
}

std::vector<Vec3> directions_for(int d, int count) {
  std::vector<Vec3> dirs;
  if (d == 1) {
    dirs = {{1.0, 0.0, 0.0}, {-1.0, 0.0, 0.0}};
  } else if (d == 2) {
    for (int i = 0; i < count; ++i) {
      const double t = 2.0 * std::numbers::pi * i / count;
      dirs.push_back({std::cos(t), std::sin(t), 0.0});
    }
  } else {
    // Fibonacci sphere
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
      const double z = 1.0 - 2.0 * (i + 0.5) / count;
      const double r = std::sqrt(1.0 - z * z);
      dirs.push_back({r * std::cos(golden * i), r * std::sin(golden * i), z});
    }
  }
  return dirs;
}

Mat3 random_unit_symmetric(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat3 m{};
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) m[i][j] = m[j][i] = normal(rng);
  const double norm = std::sqrt(frob2(m, d));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m[i][j] /= norm;
  return m;
}

}  // namespace

double AssumptionVerdict::constant(const std::string& name) const {
  for (const auto& [k, v] : constants)
    if (k == name) return v;
  throw std::out_of_range("AssumptionVerdict: no constant named " + name);
}

bool AssumptionReport::all_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const auto& v) { return v.pass; });
}

const AssumptionVerdict& AssumptionReport::verdict(const std::string& id) const {
  for (const auto& v : verdicts)
    if (v.id == id) return v;
  throw std::out_of_range("AssumptionReport: no verdict " + id);
}

AssumptionReport check_assumptions(const HamiltonianModel& model, const SampleSpec& spec) {
  if (!(spec.p_max > 1.0)) throw std::invalid_argument("check_assumptions: p_max must exceed 1");
  if (spec.radial_count < 4) throw std::invalid_argument("check_assumptions: radial_count < 4");
  const int d = model.dim();
  const double mu = model.mu();

  // x-samples
  const TorusGrid grid(d, spec.n);
  const std::size_t stride =
      std::max<std::size_t>(1, (grid.size() + spec.max_nodes - 1) / spec.max_nodes);
  std::vector<Vec3> xs;
  for (std::size_t node = 0; node < grid.size(); node += stride) xs.push_back(grid.position(node));

  std::vector<double> radii{0.0};
  for (int i = 0; i < spec.radial_count; ++i) {
    const double t = static_cast<double>(i) / (spec.radial_count - 1);
    radii.push_back(1e-2 * std::pow(spec.p_max / 1e-2, t));
  }
  std::size_t mid = radii.size() - 1;
  while (mid > 1 && radii[mid] > radii.back() / 10.0) --mid;
  const auto dirs = directions_for(d, spec.directions);

  std::mt19937_64 rng(spec.seed);
  const std::size_t nr = radii.size();

  // A1
  SupFit convexity(nr);     // -min eigenvalue of D_pp H
  SupFit normalization(nr); // 1 - H
  double min_eig = inf;
  double min_h = inf;
  double coercive = inf;
  std::optional<Witness> coercivity_violation;
  // A3
  const double c_a3 = 0.5 * (1.0 + mu);
  SupFit a3(nr);
  // A5
  SupFit a5_x(nr), a5_xx(nr);
  std::vector<SupFit> a5_delta(spec.delta_values.size(), SupFit(nr));
  // A7
  double c1 = inf;
  double c2 = -inf;
  Witness c1_arg{}, c2_arg{};
  SupFit a7_upper_ratio(nr);
  SupFit a7_lower_inverse(nr);
  // A8
  SupFit a8(nr);
  // A9
  SupFit a9_xp(nr), a9_pp(nr);
  // divergence bound
  SupFit magic(nr);

  std::size_t point_samples = 0;
  const double hq_xp = (2.0 + 2.0 * mu) / (2.0 + mu);
  const double hq_pp = mu / (2.0 + mu);

  for (const auto& x : xs) {
    const PointData c = model.at(x);
    for (const auto& dir : dirs) {
      double h_mid_over_p = 0.0;
      for (std::size_t ri = 0; ri < nr; ++ri) {
        if (ri == 0 && &dir != &dirs.front()) continue;  // p = 0 once
        const double r = radii[ri];
        Vec3 p{r * dir[0], r * dir[1], r * dir[2]};
        const Sample s{x, p, static_cast<int>(ri)};
        ++point_samples;

        const double H = model.H(c.a, c.V, p);
        const Mat3 Dpp = model.DppH(c.a, p);
        const double lam = min_eigenvalue(Dpp, d);
        min_eig = std::min(min_eig, lam);
        min_h = std::min(min_h, H);
        if (!(lam > 0.0)) convexity.reject(s, lam, "D_pp H not positive definite");
        convexity.add(-lam, s);
        if (H < 1.0) normalization.reject(s, H, "H below the normalization H >= 1");
        normalization.add(1.0 - H, s);
        if (ri == mid) h_mid_over_p = H / r;
        if (ri == nr - 1) {
          const double ratio = H / r;
          coercive = std::min(coercive, ratio);
          if (!(ratio > h_mid_over_p) && !coercivity_violation)
            coercivity_violation = Witness{x, p, ratio};
        }

        // A3: Lhat >= c H - C
        a3.add(c_a3 * H - model.Lhat(c.a, c.V, p), s);

        // A5
        const Vec3 Dx = model.DxH(c, p);
        const Mat3 Dxx = model.DxxH(c, p);
        if (!(H + 1.0 > 0.0)) {
          a5_x.reject(s, H, "H + 1 <= 0");
          a5_xx.reject(s, H, "H + 1 <= 0");
        } else {
          a5_x.add(std::sqrt(dot(Dx, Dx, d)) / (H + 1.0), s);
          a5_xx.add(std::sqrt(frob2(Dxx, d)) / (H + 1.0), s);
        }

        // A7 (|p| >= 1 fixes the leading coefficients)
        const double pw = std::pow(r, 2.0 + mu);
        if (r >= 1.0) {
          const double ratio = H / pw;
          if (ratio < c1) {
            c1 = ratio;
            c1_arg = Witness{x, p, ratio};
          }
          if (ratio > c2) {
            c2 = ratio;
            c2_arg = Witness{x, p, ratio};
          }
          a7_upper_ratio.add(ratio, s);
          if (!(ratio > 0.0))
            a7_lower_inverse.reject(s, ratio, "H <= 0 at large |p|: no positive lower coefficient");
          else
            a7_lower_inverse.add(1.0 / ratio, s);
        }

        // A8: |D_p H|^2 <= C |p|^mu H + C
        const Vec3 Dp = model.DpH(c.a, p);
        const double a8_den = std::pow(r, mu) * H + 1.0;
        if (!(a8_den > 0.0))
          a8.reject(s, a8_den, "|p|^mu H + 1 <= 0");
        else
          a8.add(dot(Dp, Dp, d) / a8_den, s);

        // A9 first part
        const Mat3 Dxp = model.DxpH(c, p);
        if (!(H > 0.0)) {
          a9_xp.reject(s, H, "H <= 0");
          a9_pp.reject(s, H, "H <= 0");
          magic.reject(s, H, "H <= 0");
          for (auto& f : a5_delta) f.reject(s, H, "H <= 0");
          continue;
        }
        a9_xp.add(frob2(Dxp, d) / std::pow(H, hq_xp), s);

        double tr_xp = 0.0;
        for (int i = 0; i < d; ++i) tr_xp += Dxp[i][i];

        for (int k = 0; k < spec.matrix_samples; ++k) {
          const Mat3 M = random_unit_symmetric(d, rng);
          const Mat3 DppM = matmul(Dpp, M, d);
          const double tr_ppMM = trace(matmul(DppM, M, d), d);
          // A9 second part
          const double den = std::pow(H, hq_pp) * tr_ppMM;
          if (!(den > 0.0))
            a9_pp.reject(s, den, "tr(D_pp H M M) <= 0");
          else
            a9_pp.add(frob2(DppM, d) / den, s);

          // A5 second part: tr(D_px H M) <= delta tr(D_pp H M^2) + C_delta H
          // (D_px H is the transpose of D_xp H; the trace against symmetric M agrees)
          const double tr_pxM = trace(matmul(Dxp, M, d), d);
          for (std::size_t j = 0; j < spec.delta_values.size(); ++j) {
            const double need = (tr_pxM - spec.delta_values[j] * tr_ppMM) / H;
            a5_delta[j].add(std::max(need, 0.0), s);
          }

          // divergence bound for D^2 u = scale * M
          for (double scale : spec.hessian_scales) {
            const double tr_pp_u = trace(DppM, d) * scale;
            const double div = tr_xp + tr_pp_u;
            const double rhs = std::pow(H, hq_pp) * tr_ppMM * scale * scale + std::pow(H, hq_xp);
            magic.add(div * div / rhs, s);
          }
        }
      }
    }
  }

  AssumptionReport report;
  report.quadratic_borderline = (mu == 0.0);
  report.nodes_sampled = static_cast<int>(xs.size());
  report.directions_used = static_cast<int>(dirs.size());
  report.radii_used = static_cast<int>(nr);
  report.p_max = spec.p_max;
  report.point_samples = point_samples;

  {
    AssumptionVerdict v;
    v.id = "A1";
    v.statement = "p -> H(x,p) strictly convex; H/|p| -> infinity; H >= 1";
    v.constants = {{"min_eigenvalue_DppH", min_eig}, {"min_H", min_h},
                   {"min_H_over_p_at_pmax", coercive}};
    v.worst = convexity.arg();
    if (convexity.infeasible()) {
      v.pass = false;
      v.worst = convexity.violation();
      v.note = convexity.reason();
    } else if (normalization.infeasible()) {
      v.pass = false;
      v.worst = normalization.violation();
      v.note = normalization.reason();
    } else if (coercivity_violation) {
      v.pass = false;
      v.worst = coercivity_violation;
      v.note = "H/|p| not increasing over the outer decade";
    }
    if (report.quadratic_borderline) v.note += (v.note.empty() ? "" : "; ") + std::string("mu = 0: quadratic borderline");
    report.verdicts.push_back(v);
  }
  {
    const double C = std::max(a3.sup(), 0.0);
    auto v = finish("A3", "Lhat(x,p) >= c H(x,p) - C", a3, "C", C, radii, mid);
    v.constants.insert(v.constants.begin(), {"c", c_a3});
    report.verdicts.push_back(v);
  }
  {
    AssumptionVerdict v;
    v.id = "A5";
    v.statement = "|D_x H|, |D_xx H| <= C H + C; tr(D_px H M) <= delta tr(D_pp H M^2) + C_delta H";
    merge(v, finish("", "", a5_x, "C_x", a5_x.sup(), radii, mid));
    merge(v, finish("", "", a5_xx, "C_xx", a5_xx.sup(), radii, mid));
    for (std::size_t j = 0; j < a5_delta.size(); ++j) {
      merge(v, finish("", "", a5_delta[j], "C_delta(" + std::to_string(spec.delta_values[j]) + ")",
                      std::max(a5_delta[j].sup(), 0.0), radii, mid));
    }
    report.verdicts.push_back(v);
  }
  {
    AssumptionVerdict v;
    v.id = "A7";
    v.statement = "c1 |p|^(2+mu) + C1 <= H <= c2 |p|^(2+mu) + C2";
    // largest admissible C1 and smallest admissible C2 given c1, c2
    double C1 = inf;
    double C2 = -inf;
    std::optional<Witness> bad;
    for (const auto& x : xs) {
      const PointData c = model.at(x);
      for (const auto& dir : dirs) {
        for (double r : radii) {
          const Vec3 p{r * dir[0], r * dir[1], r * dir[2]};
          const double H = model.H(c.a, c.V, p);
          const double pw = std::pow(r, 2.0 + mu);
          C1 = std::min(C1, H - c1 * pw);
          C2 = std::max(C2, H - c2 * pw);
          if (H - c1 * pw < 0.0 && !bad) bad = Witness{x, p, H - c1 * pw};
        }
      }
    }
    C2 = std::max(C2, 0.0);
    v.constants = {{"c1", c1}, {"C1", C1}, {"c2", c2}, {"C2", C2}};
    v.worst = c1_arg;
    if (a7_lower_inverse.infeasible() || !(c1 > 0.0)) {
      v.pass = false;
      v.worst = a7_lower_inverse.infeasible() ? a7_lower_inverse.violation() : c1_arg;
      v.note = "no positive lower growth coefficient";
    } else if (bad) {
      v.pass = false;
      v.worst = bad;
      v.note = "C1 would have to be negative";
    } else {
      const double up = a7_upper_ratio.growth_slope(radii, mid);
      const double down = a7_lower_inverse.growth_slope(radii, mid);
      if (up > growth_slope_limit || down > growth_slope_limit) {
        v.pass = false;
        v.worst = up > growth_slope_limit ? c2_arg : c1_arg;
        v.note = "H does not grow like |p|^(2+mu)";
      }
    }
    if (report.quadratic_borderline) v.note += (v.note.empty() ? "" : "; ") + std::string("mu = 0: quadratic borderline (growth assumption asks 0 < mu)");
    report.verdicts.push_back(v);
  }
  report.verdicts.push_back(
      finish("A8", "|D_p H|^2 <= C |p|^mu H + C", a8, "C", std::max(a8.sup(), 0.0), radii, mid));
  {
    AssumptionVerdict v;
    v.id = "A9";
    v.statement = "|D_xp H|^2 <= C H^((2+2mu)/(2+mu)); |D_pp H M|^2 <= C H^(mu/(2+mu)) tr(D_pp H M M)";
    merge(v, finish("", "", a9_xp, "C_xp", std::max(a9_xp.sup(), 0.0), radii, mid));
    merge(v, finish("", "", a9_pp, "C_pp", std::max(a9_pp.sup(), 0.0), radii, mid));
    report.verdicts.push_back(v);
  }
  report.verdicts.push_back(finish(
      "magic",
      "|div D_p H(x,Du)|^2 <= C H^(mu/(2+mu)) tr(D_pp H D^2u D^2u) + C H^((2+2mu)/(2+mu))",
      magic, "C", std::max(magic.sup(), 0.0), radii, mid));
  return report;
}

}  // namespace mfg
