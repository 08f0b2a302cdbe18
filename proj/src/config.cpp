#include "mfg/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mfg/error.hpp"
#include "mfg/io.hpp"

namespace mfg {
namespace {

using nlohmann::json;

// Typed access to one JSON object, rejecting unknown keys.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  const json& raw(const std::string& key) const { return j_.at(key); }

  template <typename T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    if (!has(key)) return;
    out = convert<T>(j_.at(key), field(key));
  }
  template <typename T>
  void get(const std::string& key, std::optional<T>& out) {
    seen_.insert(key);
    if (!has(key)) return;
    out = convert<T>(j_.at(key), field(key));
  }
  Section sub(const std::string& key) {
    seen_.insert(key);
    static const json empty = json::object();
    return has(key) ? Section(j_.at(key), field(key)) : Section(empty, field(key));
  }
  void mark(const std::string& key) { seen_.insert(key); }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw ConfigError(field(k), "unknown field");
  }

  template <typename T>
  static T convert(const json& v, const std::string& name) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(name, "expected true or false");
      return v.get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError(name, "expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_unsigned()) return v.get<T>();
        if (v.get<long long>() < 0) throw ConfigError(name, "expected a nonnegative integer");
      }
      return v.get<T>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError(name, "expected a number");
      const double d = v.get<double>();
      if (!std::isfinite(d)) throw ConfigError(name, "expected a finite number");
      return d;
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(name, "expected a string");
      return v.get<std::string>();
    } else {
      // std::vector<double>
      if (!v.is_array()) throw ConfigError(name, "expected an array");
      T out;
      for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(convert<typename T::value_type>(v[i], name + "[" + std::to_string(i) + "]"));
      return out;
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

json poly_to_json(const TrigPolynomial& p, int d) {
  json modes = json::array();
  for (const auto& m : p.modes) {
    json k = json::array();
    for (int i = 0; i < d; ++i) k.push_back(m.k[static_cast<std::size_t>(i)]);
    modes.push_back({{"k", k}, {"cos", m.cos_coeff}, {"sin", m.sin_coeff}});
  }
  return {{"constant", p.constant}, {"modes", modes}};
}

TrigPolynomial poly_from_json(const json& j, const std::string& name) {
  Section s(j, name);
  TrigPolynomial p;
  s.get("constant", p.constant);
  s.mark("modes");
  if (s.has("modes")) {
    const json& arr = s.raw("modes");
    if (!arr.is_array()) throw ConfigError(name + ".modes", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string mname = name + ".modes[" + std::to_string(i) + "]";
      Section ms(arr[i], mname);
      TrigMode m;
      ms.mark("k");
      if (!ms.has("k") || !ms.raw("k").is_array() || ms.raw("k").empty() || ms.raw("k").size() > 3)
        throw ConfigError(mname + ".k", "expected an array of 1 to 3 integers");
      const json& k = ms.raw("k");
      for (std::size_t a = 0; a < k.size(); ++a)
        m.k[a] = Section::convert<int>(k[a], mname + ".k[" + std::to_string(a) + "]");
      ms.get("cos", m.cos_coeff);
      ms.get("sin", m.sin_coeff);
      ms.finish();
      p.modes.push_back(m);
    }
  }
  s.finish();
  return p;
}

const char* to_string(Stabilization s) { return s == Stabilization::upwind ? "upwind" : "central"; }
const char* to_string(DriftScheme s) {
  return s == DriftScheme::upwind_flux ? "upwind_flux" : "central_transpose";
}

json to_json(const RunConfig& c) {
  json probes = json::array();
  for (const auto& p : c.probes) {
    json x = json::array();
    for (int i = 0; i < c.d; ++i) x.push_back(p.x0[static_cast<std::size_t>(i)]);
    probes.push_back({{"x0", x}, {"tau", p.tau}});
  }
  json j;
  j["grid"] = {{"d", c.d}, {"n", c.n}};
  j["time"] = {{"T", c.T}, {"nt", c.nt}};
  j["model"] = {{"mu", c.mu}, {"a", poly_to_json(c.a, c.d)}, {"V", poly_to_json(c.V, c.d)}};
  j["terminal"] = {{"u_T", poly_to_json(c.u_T, c.d)}};
  j["initial"] = {{"m_0", poly_to_json(c.m_0, c.d)}};
  j["coupling"] = {{"alpha", c.alpha}};
  if (c.coupling_constant) j["coupling"]["constant"] = *c.coupling_constant;
  j["mollifier"] = {{"epsilon_schedule", c.epsilon_schedule}};
  j["solver"] = {{"damping", c.damping},
                 {"tol", c.tol},
                 {"max_iter", c.max_iter},
                 {"stabilization", to_string(c.stabilization)},
                 {"drift_scheme", to_string(c.drift_scheme)},
                 {"peclet_warn_threshold", c.peclet_warn_threshold},
                 {"warm_start", c.warm_start}};
  j["estimates"] = {{"r_list", c.r_list}, {"p_list", c.p_list}, {"probes", probes}};
  if (c.nu) j["estimates"]["nu"] = *c.nu;
  if (c.mhjr_exponent) j["estimates"]["mhjr_exponent"] = *c.mhjr_exponent;
  j["checker"] = {{"n", c.checker_n},
                  {"max_nodes", c.checker_max_nodes},
                  {"p_max", c.checker_p_max},
                  {"radial_count", c.checker_radial_count},
                  {"directions", c.checker_directions},
                  {"matrix_samples", c.checker_matrix_samples}};
  j["output"] = {{"dir", c.output_dir}};
  j["seed"] = c.seed;
  return j;
}

RunConfig from_json(const json& root) {
  RunConfig c;
  Section s(root, "");
  {
    auto g = s.sub("grid");
    g.get("d", c.d);
    g.get("n", c.n);
    g.finish();
  }
  {
    auto t = s.sub("time");
    t.get("T", c.T);
    t.get("nt", c.nt);
    t.finish();
  }
  {
    auto m = s.sub("model");
    m.get("mu", c.mu);
    m.mark("a");
    m.mark("V");
    if (m.has("a")) c.a = poly_from_json(m.raw("a"), "model.a");
    if (m.has("V")) c.V = poly_from_json(m.raw("V"), "model.V");
    m.finish();
  }
  {
    auto t = s.sub("terminal");
    t.mark("u_T");
    if (t.has("u_T")) c.u_T = poly_from_json(t.raw("u_T"), "terminal.u_T");
    t.finish();
  }
  {
    auto t = s.sub("initial");
    t.mark("m_0");
    if (t.has("m_0")) c.m_0 = poly_from_json(t.raw("m_0"), "initial.m_0");
    t.finish();
  }
  {
    auto k = s.sub("coupling");
    k.get("alpha", c.alpha);
    k.get("constant", c.coupling_constant);
    k.finish();
  }
  {
    auto m = s.sub("mollifier");
    m.get("epsilon_schedule", c.epsilon_schedule);
    m.finish();
  }
  {
    auto v = s.sub("solver");
    v.get("damping", c.damping);
    v.get("tol", c.tol);
    v.get("max_iter", c.max_iter);
    std::string stab = to_string(c.stabilization);
    v.get("stabilization", stab);
    if (stab == "central") c.stabilization = Stabilization::central;
    else if (stab == "upwind") c.stabilization = Stabilization::upwind;
    else throw ConfigError("solver.stabilization", "expected \"central\" or \"upwind\"");
    std::string drift = to_string(c.drift_scheme);
    v.get("drift_scheme", drift);
    if (drift == "central_transpose") c.drift_scheme = DriftScheme::central_transpose;
    else if (drift == "upwind_flux") c.drift_scheme = DriftScheme::upwind_flux;
    else throw ConfigError("solver.drift_scheme", "expected \"central_transpose\" or \"upwind_flux\"");
    v.get("peclet_warn_threshold", c.peclet_warn_threshold);
    v.get("warm_start", c.warm_start);
    v.finish();
  }
  {
    auto e = s.sub("estimates");
    e.get("r_list", c.r_list);
    e.get("p_list", c.p_list);
    e.get("nu", c.nu);
    e.get("mhjr_exponent", c.mhjr_exponent);
    e.mark("probes");
    if (e.has("probes")) {
      const json& arr = e.raw("probes");
      if (!arr.is_array()) throw ConfigError("estimates.probes", "expected an array");
      c.probes.clear();
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string name = "estimates.probes[" + std::to_string(i) + "]";
        Section ps(arr[i], name);
        Probe p;
        std::vector<double> x;
        ps.get("x0", x);
        if (x.empty() || x.size() > 3) throw ConfigError(name + ".x0", "expected 1 to 3 coordinates");
        for (std::size_t a = 0; a < x.size(); ++a) p.x0[a] = x[a];
        ps.get("tau", p.tau);
        ps.finish();
        c.probes.push_back(p);
      }
    }
    e.finish();
  }
  {
    auto k = s.sub("checker");
    k.get("n", c.checker_n);
    k.get("max_nodes", c.checker_max_nodes);
    k.get("p_max", c.checker_p_max);
    k.get("radial_count", c.checker_radial_count);
    k.get("directions", c.checker_directions);
    k.get("matrix_samples", c.checker_matrix_samples);
    k.finish();
  }
  {
    auto o = s.sub("output");
    o.get("dir", c.output_dir);
    o.finish();
  }
  s.get("seed", c.seed);
  s.finish();
  return c;
}

void check_poly_dims(const TrigPolynomial& p, int d, const std::string& name) {
  for (std::size_t i = 0; i < p.modes.size(); ++i)
    for (int a = d; a < 3; ++a)
      if (p.modes[i].k[static_cast<std::size_t>(a)] != 0)
        throw ConfigError(name + ".modes[" + std::to_string(i) + "].k",
                          "wave-vector has components beyond dimension " + std::to_string(d));
}

}  // namespace

bool RunConfig::operator==(const RunConfig& o) const {
  auto probes_eq = [](const std::vector<Probe>& x, const std::vector<Probe>& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i].x0 != y[i].x0 || x[i].tau != y[i].tau) return false;
    return true;
  };
  return d == o.d && n == o.n && T == o.T && nt == o.nt && mu == o.mu && a == o.a && V == o.V &&
         u_T == o.u_T && m_0 == o.m_0 && alpha == o.alpha &&
         coupling_constant == o.coupling_constant && epsilon_schedule == o.epsilon_schedule &&
         damping == o.damping && tol == o.tol && max_iter == o.max_iter &&
         stabilization == o.stabilization && drift_scheme == o.drift_scheme &&
         peclet_warn_threshold == o.peclet_warn_threshold && warm_start == o.warm_start &&
         r_list == o.r_list && p_list == o.p_list && nu == o.nu && probes_eq(probes, o.probes) &&
         mhjr_exponent == o.mhjr_exponent && checker_n == o.checker_n &&
         checker_max_nodes == o.checker_max_nodes && checker_p_max == o.checker_p_max &&
         checker_radial_count == o.checker_radial_count &&
         checker_directions == o.checker_directions &&
         checker_matrix_samples == o.checker_matrix_samples && output_dir == o.output_dir &&
         seed == o.seed;
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
  }
  return from_json(j);
}

RunConfig load_config(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    throw ConfigError("<file>", e.what());
  }
  return parse_config(text);
}

std::string serialize_config(const RunConfig& c) { return to_json(c).dump(2) + "\n"; }

void validate_config(const RunConfig& c) {
  if (c.d < 1 || c.d > 3) throw ConfigError("grid.d", "must be 1, 2 or 3");
  if (c.n < 4) throw ConfigError("grid.n", "must be at least 4");
  if (!(c.T > 0.0)) throw ConfigError("time.T", "must be positive");
  if (c.nt < 1) throw ConfigError("time.nt", "must be at least 1");
  if (!(c.mu >= 0.0 && c.mu < 1.0)) throw ConfigError("model.mu", "must lie in [0, 1)");
  check_poly_dims(c.a, c.d, "model.a");
  check_poly_dims(c.V, c.d, "model.V");
  check_poly_dims(c.u_T, c.d, "terminal.u_T");
  check_poly_dims(c.m_0, c.d, "initial.m_0");
  {
    const auto issues = HamiltonianModel(c.d, c.a, c.V, c.mu).problems();
    if (!issues.empty()) throw ConfigError("model", issues.front());
  }
  if (!(c.alpha > 0.0)) throw ConfigError("coupling.alpha", "must be positive");
  if (c.epsilon_schedule.empty()) throw ConfigError("mollifier.epsilon_schedule", "must not be empty");
  for (std::size_t i = 0; i < c.epsilon_schedule.size(); ++i) {
    if (!(c.epsilon_schedule[i] > 0.0))
      throw ConfigError("mollifier.epsilon_schedule", "values must be positive");
    if (i && !(c.epsilon_schedule[i] < c.epsilon_schedule[i - 1]))
      throw ConfigError("mollifier.epsilon_schedule", "must be strictly decreasing");
  }
  if (!(c.damping > 0.0 && c.damping <= 1.0)) throw ConfigError("solver.damping", "must lie in (0, 1]");
  if (!(c.tol > 0.0)) throw ConfigError("solver.tol", "must be positive");
  if (c.max_iter < 1) throw ConfigError("solver.max_iter", "must be at least 1");
  if (!(c.peclet_warn_threshold > 0.0))
    throw ConfigError("solver.peclet_warn_threshold", "must be positive");
  for (double r : c.r_list)
    if (!(r >= 1.0)) throw ConfigError("estimates.r_list", "entries must be at least 1");
  for (double p : c.p_list)
    if (!(p >= 1.0)) throw ConfigError("estimates.p_list", "entries must be at least 1");
  if (c.nu && !(*c.nu > (c.d - 1.0) / c.d && *c.nu < 1.0))
    throw ConfigError("estimates.nu", "must lie in ((d-1)/d, 1)");
  if (c.mhjr_exponent && !(*c.mhjr_exponent > 2.0))
    throw ConfigError("estimates.mhjr_exponent", "must exceed 2");
  for (std::size_t i = 0; i < c.probes.size(); ++i) {
    const std::string name = "estimates.probes[" + std::to_string(i) + "]";
    for (int a = c.d; a < 3; ++a)
      if (c.probes[i].x0[static_cast<std::size_t>(a)] != 0.0)
        throw ConfigError(name + ".x0", "has coordinates beyond the dimension");
    if (!(c.probes[i].tau >= 0.0 && c.probes[i].tau < c.T))
      throw ConfigError(name + ".tau", "must lie in [0, T)");
    const TimeGrid t(c.T, c.nt);
    if (t.nearest_node(c.probes[i].tau) >= c.nt)
      throw ConfigError(name + ".tau", "rounds to the terminal time node");
  }
  if (c.checker_n < 4) throw ConfigError("checker.n", "must be at least 4");
  if (c.checker_max_nodes < 1) throw ConfigError("checker.max_nodes", "must be positive");
  if (!(c.checker_p_max > 1.0)) throw ConfigError("checker.p_max", "must exceed 1");
  if (c.checker_radial_count < 4) throw ConfigError("checker.radial_count", "must be at least 4");
  if (c.checker_directions < 1) throw ConfigError("checker.directions", "must be positive");
  if (c.checker_matrix_samples < 1) throw ConfigError("checker.matrix_samples", "must be positive");

  // m_0 must be a probability density on the grid before any solve
  const ScalarField m0 = c.m_0.sample(TorusGrid(c.d, c.n));
  if (min_value(m0) < 0.0) throw ConfigError("initial.m_0", "density is negative somewhere");
  const double m = mass(m0);
  if (std::abs(m - 1.0) > 1e-10) {
    std::ostringstream os;
    os << "density is not normalized: discrete mass " << format_double(m) << " (expected 1)";
    throw ConfigError("initial.m_0", os.str());
  }
}

HamiltonianModel make_model(const RunConfig& c) { return HamiltonianModel(c.d, c.a, c.V, c.mu); }
TorusGrid make_grid(const RunConfig& c) { return TorusGrid(c.d, c.n); }
TimeGrid make_time_grid(const RunConfig& c) { return TimeGrid(c.T, c.nt); }

FixpointConfig make_fixpoint(const RunConfig& c, bool strict) {
  FixpointConfig f;
  f.damping = c.damping;
  f.tol = c.tol;
  f.max_iter = c.max_iter;
  f.epsilon_schedule = c.epsilon_schedule;
  f.warm_start = c.warm_start;
  f.strict = strict;
  f.hjb.stabilization = c.stabilization;
  f.hjb.peclet_warn_threshold = c.peclet_warn_threshold;
  f.hjb.strict = strict;
  f.fp.scheme = c.drift_scheme;
  return f;
}

EstimateConfig make_estimate_config(const RunConfig& c) {
  EstimateConfig e;
  e.r_list = c.r_list;
  e.p_list = c.p_list;
  e.nu = c.nu;
  e.probes = c.probes;
  e.mhjr_exponent = c.mhjr_exponent;
  e.fp.scheme = c.drift_scheme;
  return e;
}

SampleSpec make_sample_spec(const RunConfig& c) {
  SampleSpec s;
  s.n = c.checker_n;
  s.max_nodes = c.checker_max_nodes;
  s.p_max = c.checker_p_max;
  s.radial_count = c.checker_radial_count;
  s.directions = c.checker_directions;
  s.matrix_samples = c.checker_matrix_samples;
  s.seed = c.seed;
  return s;
}

RunConfig with_override(const RunConfig& c, const std::string& path, const std::string& value) {
  json j = to_json(c);
  json v;
  try {
    v = json::parse(value);
  } catch (const json::parse_error&) {
    throw ConfigError(path, "override value is not valid JSON");
  }
  std::string pointer = "/" + path;
  for (auto& ch : pointer)
    if (ch == '.') ch = '/';
  try {
    j[json::json_pointer(pointer)] = v;
  } catch (const json::exception& e) {
    throw ConfigError(path, std::string("cannot override: ") + e.what());
  }
  return from_json(j);
}

}  // namespace mfg
