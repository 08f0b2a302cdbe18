#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <vector>

#include "mfg/assumptions.hpp"
#include "mfg/cli.hpp"
#include "mfg/config.hpp"
#include "mfg/driver.hpp"
#include "mfg/exponents.hpp"
#include "mfg/io.hpp"

namespace py = pybind11;
using namespace mfg;

namespace {

// (nt+1, n, ..., n) copy of a history; frames before first_index are absent.
py::array_t<double> to_array(const FieldHistory& h) {
  const TorusGrid& g = h.grid();
  std::vector<py::ssize_t> shape{static_cast<py::ssize_t>(h.frame_count())};
  for (int i = 0; i < g.dim(); ++i) shape.push_back(g.points_per_axis());
  py::array_t<double> out(shape);
  double* dst = out.mutable_data();
  for (const auto& f : h.frames()) dst = std::copy(f.values().begin(), f.values().end(), dst);
  return out;
}

py::dict stage_dict(const MFGSolution& s, const EstimateReport* r) {
  py::dict d;
  d["epsilon"] = s.epsilon;
  d["iterations"] = s.iterations;
  d["residual_history"] = s.residual_history;
  d["u"] = to_array(s.u);
  d["m"] = to_array(s.m);
  d["max_clip"] = s.max_clip;
  if (r) {
    py::dict sc;
    for (const auto& [k, v] : r->scalars()) sc[py::str(k)] = v;
    d["scalars"] = sc;
  }
  return d;
}

py::dict params_dict(const ExponentParams& p) {
  py::dict d;
  d["d"] = p.d;
  d["mu"] = p.mu;
  d["alpha"] = p.alpha;
  d["theta"] = p.theta;
  d["upsilon"] = p.upsilon;
  d["beta0"] = p.beta0;
  d["r"] = p.r;
  d["kappa"] = p.kappa;
  d["beta"] = p.beta;
  d["p"] = p.p;
  d["capa_exponent"] = p.capa_exponent;
  d["feasible"] = p.feasible;
  return d;
}

}  // namespace

PYBIND11_MODULE(_mfglab, m) {
  m.doc() = "Mean-field game solver on the torus with a-priori estimate monitoring.";

  // Translators run newest first, so the base class is registered first.
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<SnapshotError>(m, "SnapshotError", PyExc_IOError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

  m.def("normalize_config", [](const std::string& text) { return serialize_config(parse_config(text)); },
        py::arg("json_text"), "Parse, then serialize a config in canonical form.");
  m.def("default_config", [] { return serialize_config(RunConfig{}); });
  m.def("validate_config", [](const std::string& text) { validate_config(parse_config(text)); },
        py::arg("json_text"));

  m.def(
      "solve",
      [](const std::string& text, bool strict) {
        const RunConfig c = parse_config(text);
        SolveOutcome r;
        {
          py::gil_scoped_release release;
          r = run_solve(c, strict);
        }
        py::list stages;
        for (std::size_t i = 0; i < r.stages.size(); ++i) stages.append(stage_dict(r.stages[i], &r.reports[i]));
        py::dict out;
        out["stages"] = stages;
        out["warnings"] = r.warnings;
        return out;
      },
      py::arg("json_text"), py::arg("strict") = false,
      "Run the epsilon continuation; one dict per epsilon with u, m and estimate scalars.");

  m.def(
      "check_assumptions",
      [](const std::string& text) {
        const RunConfig c = parse_config(text);
        const AssumptionReport r = check_assumptions(make_model(c), make_sample_spec(c));
        py::dict out;
        for (const auto& v : r.verdicts) {
          py::dict e;
          e["pass"] = v.pass;
          py::dict consts;
          for (const auto& [k, val] : v.constants) consts[py::str(k)] = val;
          e["constants"] = consts;
          e["note"] = v.note;
          out[py::str(v.id)] = e;
        }
        out["quadratic_borderline"] = r.quadratic_borderline;
        out["all_pass"] = r.all_pass();
        return out;
      },
      py::arg("json_text"));

  m.def("read_snapshot",
        [](const std::string& path) {
          const FieldHistory h = read_snapshot(path);
          return py::make_tuple(to_array(h), h.time_grid().horizon());
        },
        py::arg("path"), "Frames as an array of shape (nt+1, n, ...) and the horizon T.");

  m.def("critical_alpha", &critical_alpha, py::arg("d"), py::arg("mu"));
  m.def("beta_iteration",
        [](int d, double mu, int n_max, std::optional<double> p) { return beta_iteration(d, mu, n_max, p).beta; },
        py::arg("d"), py::arg("mu"), py::arg("n_max"), py::arg("p") = py::none());
  m.def("derive_params",
        [](int d, double mu, double alpha, double theta, double upsilon, double beta0) {
          return params_dict(derive_params(d, mu, alpha, theta, upsilon, beta0));
        },
        py::arg("d"), py::arg("mu"), py::arg("alpha"), py::arg("theta"), py::arg("upsilon"), py::arg("beta0"));
  m.def("adjoint_step4_params",
        [](int d, double nu) {
          const AdjointStepParams s = adjoint_step4_params(d, nu);
          return py::dict(py::arg("kappa_nu") = s.kappa_nu, py::arg("a") = s.a, py::arg("b") = s.b);
        },
        py::arg("d"), py::arg("nu"));
  m.def(
      "feasibility_search",
      [](int d, double mu, double alpha) -> py::object {
        FeasibilityResult r;
        {
          py::gil_scoped_release release;
          r = feasibility_search(d, mu, alpha);
        }
        if (!r.witness) return py::none();
        py::dict w;
        w["main"] = params_dict(r.witness->main);
        w["tilde"] = params_dict(r.witness->tilde);
        w["zeta"] = r.witness->zeta;
        w["margin"] = r.witness->margin;
        return std::move(w);
      },
      py::arg("d"), py::arg("mu"), py::arg("alpha"), "Witness dict, or None when the search box has none.");

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "mfglab");
        std::vector<char*> argv;
        for (auto& a : args) argv.push_back(a.data());
        py::gil_scoped_release release;
        return run_cli(static_cast<int>(argv.size()), argv.data());
      },
      py::arg("args"), "Run the command-line tool in-process; returns its exit code.");
}
