#pragma once

#include <vector>

#include "mfg/grid.hpp"

namespace mfg {

/// Time-indexed trajectory of grid functions. Frame j holds time node
/// first_index() + j; forward and backward solves store all nodes
/// (first_index 0), adjoint solves start at the probe time.
class FieldHistory {
 public:
  FieldHistory(const TorusGrid& grid, const TimeGrid& time, int first_index = 0);
  /// Every frame set to `value`.
  FieldHistory(const TorusGrid& grid, const TimeGrid& time, const ScalarField& value,
               int first_index = 0);

  const TorusGrid& grid() const noexcept { return grid_; }
  const TimeGrid& time_grid() const noexcept { return time_; }
  int first_index() const noexcept { return first_; }
  int last_index() const noexcept { return time_.steps(); }
  std::size_t frame_count() const noexcept { return frames_.size(); }

  /// Frame at time node k, first_index() <= k <= nt.
  const ScalarField& at(int k) const;
  ScalarField& at(int k);
  const std::vector<ScalarField>& frames() const noexcept { return frames_; }

  bool operator==(const FieldHistory&) const = default;

 private:
  TorusGrid grid_;
  TimeGrid time_;
  int first_;
  std::vector<ScalarField> frames_;
};

/// max over time nodes of the grid max-norm of gradient_central.
double lipschitz_norm(const FieldHistory& u);
/// Same, restricted to time nodes [k0, k1].
double lipschitz_norm(const FieldHistory& u, int k0, int k1);

/// Trapezoid rule over time nodes [k0, k1] of values indexed by node.
double time_trapezoid(const std::vector<double>& values, double dt, int k0, int k1);

}  // namespace mfg
