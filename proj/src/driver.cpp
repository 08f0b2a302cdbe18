#include "mfg/driver.hpp"

#include <atomic>
#include <chrono>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "mfg/error.hpp"
#include "mfg/io.hpp"
#include "mfg/log.hpp"

namespace mfg {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr const char* tool_version = "mfglab 1.0.0";

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string stage_name(const char* stem, std::size_t i, const char* ext) {
  return std::string(stem) + "_eps" + std::to_string(i) + ext;
}

// Runs body(i) for i in [0, count) on up to `jobs` threads.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<std::string> solve_warnings(const RunConfig& c, const AssumptionReport& checks) {
  std::vector<std::string> w;
  if (CouplingPower(c.alpha).above_critical(c.d, c.mu)) {
    std::ostringstream os;
    os << "outside A10: alpha = " << format_double(c.alpha)
       << " is not below the critical exponent " << format_double(critical_alpha(c.d, c.mu))
       << "; the uniform-in-epsilon bounds are not covered by the theory";
    w.push_back(os.str());
  }
  if (checks.quadratic_borderline) w.push_back("mu = 0: quadratic borderline Hamiltonian");
  for (const auto& v : checks.verdicts)
    if (!v.pass) w.push_back("assumption " + v.id + " failed on the sample set: " + v.note);
  return w;
}

}  // namespace

SolveOutcome run_solve(const RunConfig& c, bool strict) {
  validate_config(c);
  const HamiltonianModel model = make_model(c);
  const TorusGrid grid = make_grid(c);
  const TimeGrid tgrid = make_time_grid(c);
  const AssumptionReport checks = check_assumptions(model, make_sample_spec(c));
  SolveOutcome out;
  out.warnings = solve_warnings(c, checks);
  if (strict && !checks.all_pass())
    throw Error("assumption checker failed; rerun without --strict to override");
  for (const auto& w : out.warnings) log::warn(w);

  const CouplingPower coupling(c.alpha, c.coupling_constant);
  const ScalarField u_T = c.u_T.sample(grid);
  const ScalarField m_0 = c.m_0.sample(grid);
  out.stages = solve_mfg(model, grid, tgrid, u_T, m_0, coupling, make_fixpoint(c, strict));
  const EstimateConfig ecfg = make_estimate_config(c);
  const double a3 = checks.verdict("A3").constant("C");
  for (const auto& s : out.stages) out.reports.push_back(build_report(s, model, coupling, ecfg, a3));
  return out;
}

SolveOutcome cmd_solve(const RunConfig& c, const std::filesystem::path& out, bool strict) {
  const auto t0 = Clock::now();
  SolveOutcome res = run_solve(c, strict);
  const double solve_seconds = seconds_since(t0);
  std::filesystem::create_directories(out);
  json stages = json::array();
  json files = json::array();
  for (std::size_t i = 0; i < res.stages.size(); ++i) {
    const auto& s = res.stages[i];
    write_snapshot(out / stage_name("u", i, ".mfgf"), s.u);
    write_snapshot(out / stage_name("m", i, ".mfgf"), s.m);
    std::ostringstream csv;
    write_report_csv(res.reports[i], csv);
    write_file_atomic(out / stage_name("report", i, ".csv"), csv.str());
    files.push_back(stage_name("u", i, ".mfgf"));
    files.push_back(stage_name("m", i, ".mfgf"));
    files.push_back(stage_name("report", i, ".csv"));
    stages.push_back({{"epsilon", s.epsilon},
                      {"iterations", s.iterations},
                      {"final_residual", s.residual_history.back()},
                      {"residual_history", s.residual_history},
                      {"max_clip", s.max_clip},
                      {"max_cfl", s.hjb.max_cfl},
                      {"cfl_violations", s.hjb.cfl_violations},
                      {"min_m", s.fp.min_value},
                      {"max_mass_drift", s.fp.max_mass_drift}});
  }
  write_file_atomic(out / "config.json", serialize_config(c));
  files.push_back("config.json");
  const bool outside = CouplingPower(c.alpha).above_critical(c.d, c.mu);
  json manifest = {
      {"tool", tool_version},
      {"versions", {{"mfglab", tool_version}, {"json", "nlohmann " + std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR)}}},
      {"outside_A10", outside},
      {"warnings", res.warnings},
      {"config", json::parse(serialize_config(c))},
      {"stages", stages},
      {"files", files},
      {"timings_seconds", {{"solve_and_estimates", solve_seconds}, {"total", seconds_since(t0)}}}};
  write_file_atomic(out / "manifest.json", manifest.dump(2) + "\n");
  return res;
}

std::string format_assumption_text(const AssumptionReport& r) {
  std::ostringstream os;
  os << "assumption check: " << (r.all_pass() ? "all pass" : "FAILURES") << "\n";
  os << "samples: " << r.point_samples << " points, " << r.nodes_sampled << " nodes, "
     << r.directions_used << " directions, " << r.radii_used << " radii up to |p| = "
     << format_double(r.p_max) << "\n";
  if (r.quadratic_borderline) os << "note: mu = 0 is the quadratic borderline\n";
  for (const auto& v : r.verdicts) {
    os << "\n[" << v.id << "] " << (v.pass ? "pass" : "FAIL") << "  " << v.statement << "\n";
    for (const auto& [k, val] : v.constants) os << "  " << k << " = " << format_double(val) << "\n";
    if (v.worst) {
      os << "  " << (v.pass ? "arg-max" : "witness") << ": x = (" << format_double(v.worst->x[0])
         << ", " << format_double(v.worst->x[1]) << ", " << format_double(v.worst->x[2])
         << "), p = (" << format_double(v.worst->p[0]) << ", " << format_double(v.worst->p[1])
         << ", " << format_double(v.worst->p[2]) << "), value = " << format_double(v.worst->value)
         << "\n";
    }
    if (!v.note.empty()) os << "  note: " << v.note << "\n";
  }
  return os.str();
}

std::string format_assumption_csv(const AssumptionReport& r) {
  std::string out = csv_row({"assumption", "pass", "constant", "value", "x0", "x1", "x2", "p0",
                             "p1", "p2", "witness_value"});
  for (const auto& v : r.verdicts) {
    for (const auto& [k, val] : v.constants) {
      std::vector<std::string> row{v.id, v.pass ? "1" : "0", k, format_double(val)};
      if (v.worst) {
        for (double x : v.worst->x) row.push_back(format_double(x));
        for (double p : v.worst->p) row.push_back(format_double(p));
        row.push_back(format_double(v.worst->value));
      } else {
        row.insert(row.end(), 7, "");
      }
      out += csv_row(row);
    }
  }
  return out;
}

AssumptionReport cmd_check_assumptions(const RunConfig& c, const std::filesystem::path& out) {
  // Only the model and sampling fields matter here.
  if (c.d < 1 || c.d > 3) throw ConfigError("grid.d", "must be 1, 2 or 3");
  const AssumptionReport r = check_assumptions(make_model(c), make_sample_spec(c));
  write_file_atomic(out / "assumptions.txt", format_assumption_text(r));
  write_file_atomic(out / "assumptions.csv", format_assumption_csv(r));
  return r;
}

std::vector<EstimateReport> cmd_verify(const RunConfig& c, const std::filesystem::path& artifacts,
                                       const std::filesystem::path& out) {
  validate_config(c);
  const HamiltonianModel model = make_model(c);
  const CouplingPower coupling(c.alpha, c.coupling_constant);
  const EstimateConfig ecfg = make_estimate_config(c);
  const double a3 = check_assumptions(model, make_sample_spec(c)).verdict("A3").constant("C");
  const SnapshotExpectation expect{c.d, c.n, c.nt};
  std::vector<EstimateReport> reports;
  for (std::size_t i = 0; i < c.epsilon_schedule.size(); ++i) {
    MFGSolution sol{read_snapshot(artifacts / stage_name("u", i, ".mfgf"), expect),
                    read_snapshot(artifacts / stage_name("m", i, ".mfgf"), expect),
                    c.epsilon_schedule[i], 0, {}, 0.0, {}, {}};
    if (!(sol.u.time_grid() == make_time_grid(c)))
      throw SnapshotError((artifacts / stage_name("u", i, ".mfgf")).string(), 0,
                          "horizon T differs from the config");
    reports.push_back(build_report(sol, model, coupling, ecfg, a3));
    std::ostringstream csv;
    write_report_csv(reports.back(), csv);
    write_file_atomic(out / stage_name("verify", i, ".csv"), csv.str());
  }
  return reports;
}

std::vector<ExponentCase> exponent_sweep(const std::vector<int>& ds, const std::vector<double>& mus,
                                         const std::vector<double>& fractions, double cap) {
  std::vector<ExponentCase> out;
  for (int d : ds)
    for (double mu : mus)
      for (double f : fractions)
        out.push_back({d, mu, f * std::min(critical_alpha(d, mu), cap)});
  return out;
}

std::string feasibility_csv(const std::vector<ExponentCase>& cases, const SearchSpec& spec, int jobs) {
  std::vector<FeasibilityResult> results(cases.size());
  parallel_for(cases.size(), jobs, [&](std::size_t i) {
    results[i] = feasibility_search(cases[i].d, cases[i].mu, cases[i].alpha, spec);
  });
  std::string out = csv_row({"d", "mu", "alpha", "critical_alpha", "feasible", "margin", "zeta",
                             "beta0", "theta", "upsilon", "r", "p", "theta_tilde",
                             "upsilon_tilde", "r_tilde", "p_tilde", "capa_exponent",
                             "theta_max", "beta0_hi"});
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& c = cases[i];
    const auto& r = results[i];
    const FeasibilityWitness& w = r.witness ? *r.witness : r.best;
    out += csv_row({std::to_string(c.d), format_double(c.mu), format_double(c.alpha),
                    format_double(critical_alpha(c.d, c.mu)), r.witness ? "1" : "0",
                    format_double(w.margin), format_double(w.zeta), format_double(w.main.beta0),
                    format_double(w.main.theta), format_double(w.main.upsilon),
                    format_double(w.main.r), format_double(w.main.p), format_double(w.tilde.theta),
                    format_double(w.tilde.upsilon), format_double(w.tilde.r),
                    format_double(w.tilde.p), format_double(w.main.capa_exponent),
                    format_double(r.theta_max), format_double(r.beta0_hi)});
  }
  return out;
}

SweepSpec load_sweep(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
  } catch (const Error& e) {
    throw ConfigError("<file>", e.what());
  }
  if (!j.is_object() || !j.contains("base")) throw ConfigError("base", "sweep file needs a base config");
  for (const auto& [k, v] : j.items())
    if (k != "base" && k != "vary") throw ConfigError(k, "unknown field");
  SweepSpec s;
  s.base = parse_config(j.at("base").dump());
  if (j.contains("vary")) {
    if (!j.at("vary").is_object()) throw ConfigError("vary", "expected an object of arrays");
    for (const auto& [k, v] : j.at("vary").items()) {
      if (!v.is_array() || v.empty()) throw ConfigError("vary." + k, "expected a non-empty array");
      std::vector<std::string> vals;
      for (const auto& e : v) vals.push_back(e.dump());
      s.vary.emplace_back(k, vals);
    }
  }
  return s;
}

std::vector<RunConfig> expand_sweep(const SweepSpec& s) {
  std::vector<RunConfig> out{s.base};
  for (const auto& [path, vals] : s.vary) {
    std::vector<RunConfig> next;
    for (const auto& c : out)
      for (const auto& v : vals) next.push_back(with_override(c, path, v));
    out = std::move(next);
  }
  return out;
}

int cmd_sweep(const SweepSpec& s, const std::filesystem::path& out, int jobs, bool strict) {
  const std::vector<RunConfig> runs = expand_sweep(s);
  std::vector<json> entries(runs.size());
  std::atomic<int> failures{0};
  parallel_for(runs.size(), jobs, [&](std::size_t i) {
    const std::string dir = "run_" + std::to_string(i);
    json e = {{"index", i}, {"dir", dir}};
    const auto t0 = Clock::now();
    try {
      const SolveOutcome r = cmd_solve(runs[i], out / dir, strict);
      e["status"] = "ok";
      json iters = json::array();
      for (const auto& st : r.stages) iters.push_back(st.iterations);
      e["iterations"] = iters;
      e["warnings"] = r.warnings;
    } catch (const std::exception& ex) {
      ++failures;
      e["status"] = "failed";
      e["error"] = ex.what();
      if (const auto* ce = dynamic_cast<const ConvergenceError*>(&ex))
        e["residual_history"] = ce->residual_history();
    }
    e["seconds"] = seconds_since(t0);
    json overrides = json::object();
    std::size_t stride = runs.size();
    std::size_t rem = i;
    for (const auto& [path, vals] : s.vary) {
      stride /= vals.size();
      overrides[path] = json::parse(vals[rem / stride]);
      rem %= stride;
    }
    e["overrides"] = overrides;
    entries[i] = e;
  });
  json manifest = {{"tool", tool_version}, {"runs", entries}, {"failures", failures.load()}};
  write_file_atomic(out / "sweep_manifest.json", manifest.dump(2) + "\n");
  return failures.load();
}

}  // namespace mfg
