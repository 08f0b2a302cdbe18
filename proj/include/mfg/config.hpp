#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mfg/assumptions.hpp"
#include "mfg/coupler.hpp"
#include "mfg/estimates.hpp"
#include "mfg/hamiltonian.hpp"

namespace mfg {

/// Everything a run needs. Serialized as JSON; parse(serialize(c)) == c.
struct RunConfig {
  int d = 1;
  int n = 64;
  double T = 0.25;
  int nt = 100;
  double mu = 0.5;
  TrigPolynomial a{1.0, {}};
  TrigPolynomial V{1.0, {}};
  TrigPolynomial u_T{0.0, {}};
  TrigPolynomial m_0{1.0, {}};
  double alpha = 0.5;
  std::optional<double> coupling_constant;
  std::vector<double> epsilon_schedule{0.1, 0.05, 0.025};
  double damping = 0.5;
  double tol = 1e-6;
  int max_iter = 200;
  Stabilization stabilization = Stabilization::central;
  DriftScheme drift_scheme = DriftScheme::central_transpose;
  double peclet_warn_threshold = 1.0;
  bool warm_start = true;
  std::vector<double> r_list{1.5, 2.0};
  std::vector<double> p_list{1.0, 2.0};
  std::optional<double> nu;
  std::vector<Probe> probes{{{0.25, 0.0, 0.0}, 0.0}, {{0.5, 0.0, 0.0}, 0.125}};
  std::optional<double> mhjr_exponent;
  int checker_n = 64;
  int checker_max_nodes = 4096;
  double checker_p_max = 50.0;
  int checker_radial_count = 48;
  int checker_directions = 64;
  int checker_matrix_samples = 4;
  std::string output_dir = "out";
  std::uint64_t seed = 20140915;

  bool operator==(const RunConfig&) const;
};

/// Throws ConfigError naming the offending field (dotted path).
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& c);

/// Checks cross-field invariants (model validity, m_0 mass, probes, ...).
void validate_config(const RunConfig& c);

HamiltonianModel make_model(const RunConfig& c);
TorusGrid make_grid(const RunConfig& c);
TimeGrid make_time_grid(const RunConfig& c);
FixpointConfig make_fixpoint(const RunConfig& c, bool strict);
EstimateConfig make_estimate_config(const RunConfig& c);
SampleSpec make_sample_spec(const RunConfig& c);

/// Sets a field by dotted path (as used in config files) from a JSON value
/// literal; used by sweeps.
RunConfig with_override(const RunConfig& c, const std::string& path, const std::string& json_value);

}  // namespace mfg
