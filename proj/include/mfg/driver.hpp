#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mfg/assumptions.hpp"
#include "mfg/config.hpp"
#include "mfg/exponents.hpp"

namespace mfg {

struct SolveOutcome {
  std::vector<MFGSolution> stages;
  std::vector<EstimateReport> reports;
  std::vector<std::string> warnings;
};

/// Validates the config, runs the epsilon continuation and builds one
/// EstimateReport per epsilon. Writes nothing.
SolveOutcome run_solve(const RunConfig& c, bool strict);

/// run_solve plus artifacts in `out`: u_eps<i>.mfgf, m_eps<i>.mfgf,
/// report_eps<i>.csv, config.json and manifest.json.
SolveOutcome cmd_solve(const RunConfig& c, const std::filesystem::path& out, bool strict);

/// Human-readable text and machine CSV of an assumption report.
std::string format_assumption_text(const AssumptionReport& r);
std::string format_assumption_csv(const AssumptionReport& r);
/// Writes assumptions.txt and assumptions.csv; returns the report.
AssumptionReport cmd_check_assumptions(const RunConfig& c, const std::filesystem::path& out);

/// Rebuilds EstimateReports from stored snapshots and writes verify_eps<i>.csv.
std::vector<EstimateReport> cmd_verify(const RunConfig& c, const std::filesystem::path& artifacts,
                                       const std::filesystem::path& out);

struct ExponentCase {
  int d = 2;
  double mu = 0.5;
  double alpha = 0.1;
};
/// alpha = fraction * min(critical_alpha, cap) for every (d, mu, fraction).
std::vector<ExponentCase> exponent_sweep(const std::vector<int>& ds, const std::vector<double>& mus,
                                         const std::vector<double>& fractions, double cap);
/// Feasibility CSV with one row per case, computed on `jobs` threads; row
/// order and content do not depend on `jobs`.
std::string feasibility_csv(const std::vector<ExponentCase>& cases, const SearchSpec& spec, int jobs);

struct SweepSpec {
  RunConfig base;
  std::vector<std::pair<std::string, std::vector<std::string>>> vary;  // dotted path -> JSON literals
};
SweepSpec load_sweep(const std::string& path);
/// Cartesian product of the varied fields, in lexicographic order with the
/// last path varying fastest.
std::vector<RunConfig> expand_sweep(const SweepSpec& s);
/// Runs each member into out/run_<i>; writes out/sweep_manifest.json.
/// Returns the number of failed members.
int cmd_sweep(const SweepSpec& s, const std::filesystem::path& out, int jobs, bool strict);

}  // namespace mfg
