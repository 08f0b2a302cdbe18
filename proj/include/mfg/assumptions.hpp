#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mfg/hamiltonian.hpp"

namespace mfg {

struct SampleSpec {
  int n = 64;                      // grid whose nodes supply x-samples
  int max_nodes = 4096;            // nodes are strided down to at most this many
  double p_max = 50.0;
  int radial_count = 48;           // log-spaced radii in [1e-2, p_max], plus p = 0
  int directions = 64;             // unit directions for d >= 2
  int matrix_samples = 4;          // random symmetric |M| = 1 per (x, p)
  std::vector<double> delta_values{1.0, 0.1, 0.01};
  std::vector<double> hessian_scales{0.01, 0.1, 1.0, 10.0, 100.0};
  std::uint64_t seed = 20140915;
};

struct Witness {
  Vec3 x{};
  Vec3 p{};
  double value = 0.0;
};

struct AssumptionVerdict {
  std::string id;         // "A1", "A3", ..., "magic"
  std::string statement;  // the inequality checked
  bool pass = true;
  std::vector<std::pair<std::string, double>> constants;
  std::optional<Witness> worst;  // arg-max sample, or the violating sample on failure
  std::string note;

  double constant(const std::string& name) const;
};

struct AssumptionReport {
  std::vector<AssumptionVerdict> verdicts;
  bool quadratic_borderline = false;  // mu == 0
  // sample ranges used
  int nodes_sampled = 0;
  int directions_used = 0;
  int radii_used = 0;
  double p_max = 0.0;
  std::size_t point_samples = 0;

  bool all_pass() const;
  const AssumptionVerdict& verdict(const std::string& id) const;
};

/// Evaluates A1, A3, A5, A7, A8, A9 and the derived divergence bound on a
/// deterministic sample set, fitting the smallest constants that make every
/// sample pass.
AssumptionReport check_assumptions(const HamiltonianModel& model, const SampleSpec& spec);

}  // namespace mfg
