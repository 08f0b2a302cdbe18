#include "mfg/cli.hpp"

#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "mfg/driver.hpp"
#include "mfg/error.hpp"
#include "mfg/io.hpp"
#include "mfg/log.hpp"

namespace mfg {
namespace {

// Exit codes: 0 ok, 1 solver/check failure, 2 usage or config error.
constexpr int exit_failure = 1;
constexpr int exit_usage = 2;

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"mfglab: mean-field game solver and a-priori estimate verifier"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string artifacts_dir;
  int jobs = 1;
  bool strict = false;

  auto* solve = app.add_subcommand("solve", "Solve the regularized system for each epsilon");
  solve->add_option("--config", config_path, "Run config (JSON)")->required();
  solve->add_option("--out", out_dir, "Output directory (default: config output.dir)");
  solve->add_flag("--strict", strict, "Treat warnings (CFL, clipping, failed checks) as errors");

  auto* check = app.add_subcommand("check-assumptions", "Sample the structural assumptions on H");
  check->add_option("--config", config_path, "Run config (JSON)")->required();
  check->add_option("--out", out_dir, "Output directory (default: config output.dir)");
  check->add_flag("--strict", strict, "Exit nonzero when any assumption fails");

  auto* verify = app.add_subcommand("verify", "Recompute estimate reports from stored snapshots");
  verify->add_option("--config", config_path, "Run config (JSON)")->required();
  verify->add_option("--artifacts", artifacts_dir, "Directory holding the solve snapshots");
  verify->add_option("--out", out_dir, "Output directory (default: artifacts dir)");

  auto* sweep = app.add_subcommand("sweep", "Run a cartesian parameter sweep");
  sweep->add_option("--config", config_path, "Sweep file: {\"base\": config, \"vary\": {...}}")->required();
  sweep->add_option("--out", out_dir, "Output directory")->required();
  sweep->add_option("--jobs", jobs, "Concurrent runs")->check(CLI::PositiveNumber);
  sweep->add_flag("--strict", strict, "Strict mode for every member");

  int d = 2;
  double mu = 0.5;
  std::optional<double> alpha;
  std::vector<int> d_list;
  std::vector<double> mu_list;
  std::vector<double> fractions;
  double alpha_cap = 5.0;
  SearchSpec search;
  auto* expo = app.add_subcommand("exponents", "Feasibility search for the bootstrap exponents");
  expo->add_option("--d", d, "Dimension");
  expo->add_option("--mu", mu, "Growth exponent mu");
  expo->add_option("--alpha", alpha, "Coupling power (single case)");
  expo->add_option("--d-list", d_list, "Dimensions to sweep");
  expo->add_option("--mu-list", mu_list, "mu values to sweep");
  expo->add_option("--alpha-fractions", fractions, "alpha as fractions of min(critical, cap)");
  expo->add_option("--alpha-cap", alpha_cap, "Cap on alpha when the critical value is infinite or large");
  expo->add_option("--theta-max", search.theta_max, "Largest theta searched");
  expo->add_option("--out", out_dir, "Output CSV path (default: stdout)");
  expo->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : exit_usage;
  }

  try {
    if (*solve || *check || *verify) {
      const RunConfig c = load_config(config_path);
      const std::filesystem::path out = out_dir.empty() ? c.output_dir : out_dir;
      if (*solve) {
        const SolveOutcome r = cmd_solve(c, out, strict);
        for (const auto& w : r.warnings) std::cerr << "WARNING: " << w << "\n";
        for (const auto& s : r.stages)
          std::cout << "eps " << format_double(s.epsilon) << ": " << s.iterations
                    << " iterations, residual " << format_double(s.residual_history.back()) << "\n";
        std::cout << "artifacts written to " << out.string() << "\n";
      } else if (*check) {
        const AssumptionReport r = cmd_check_assumptions(c, out);
        std::cout << format_assumption_text(r);
        if (strict && !r.all_pass()) return exit_failure;
      } else {
        const std::filesystem::path art = artifacts_dir.empty() ? std::filesystem::path(c.output_dir)
                                                                : std::filesystem::path(artifacts_dir);
        const auto reports = cmd_verify(c, art, out_dir.empty() ? art : std::filesystem::path(out_dir));
        std::cout << "verified " << reports.size() << " stages\n";
      }
    } else if (*sweep) {
      const int failed = cmd_sweep(load_sweep(config_path), out_dir, jobs, strict);
      std::cout << "sweep finished with " << failed << " failed members\n";
      if (failed) return exit_failure;
    } else if (*expo) {
      std::vector<ExponentCase> cases;
      if (!d_list.empty() || !mu_list.empty() || !fractions.empty()) {
        if (d_list.empty() || mu_list.empty() || fractions.empty()) {
          std::cerr << "error: --d-list, --mu-list and --alpha-fractions go together\n";
          return exit_usage;
        }
        cases = exponent_sweep(d_list, mu_list, fractions, alpha_cap);
      } else {
        if (!alpha) {
          std::cerr << "error: give --alpha, or the sweep lists\n";
          return exit_usage;
        }
        cases.push_back({d, mu, *alpha});
      }
      const std::string csv = feasibility_csv(cases, search, jobs);
      if (out_dir.empty())
        std::cout << csv;
      else
        write_file_atomic(out_dir, csv);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_usage;
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\nresidual history:";
    for (double r : e.residual_history()) std::cerr << " " << format_double(r);
    std::cerr << "\n";
    return exit_failure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_failure;
  }
  return 0;
}

}  // namespace mfg
