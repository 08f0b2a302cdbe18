#include "mfg/history.hpp"

#include <algorithm>
#include <utility>
#include <stdexcept>
#include <string>

namespace mfg {

FieldHistory::FieldHistory(const TorusGrid& grid, const TimeGrid& time, int first_index)
    : FieldHistory(grid, time, ScalarField(grid), first_index) {}

FieldHistory::FieldHistory(const TorusGrid& grid, const TimeGrid& time, const ScalarField& value,
                           int first_index)
    : grid_(grid), time_(time), first_(first_index) {
  if (first_index < 0 || first_index > time.steps())
    throw std::invalid_argument("FieldHistory: first index outside the time grid");
  require_same_grid(grid, value.grid(), "FieldHistory");
  frames_.assign(static_cast<std::size_t>(time.steps() - first_index + 1), value);
}

const ScalarField& FieldHistory::at(int k) const {
  if (k < first_ || k > time_.steps())
    throw std::out_of_range("FieldHistory: time node " + std::to_string(k) + " not stored");
  return frames_[static_cast<std::size_t>(k - first_)];
}

ScalarField& FieldHistory::at(int k) {
  return const_cast<ScalarField&>(std::as_const(*this).at(k));
}

double lipschitz_norm(const FieldHistory& u) {
  return lipschitz_norm(u, u.first_index(), u.last_index());
}

double lipschitz_norm(const FieldHistory& u, int k0, int k1) {
  VectorField g(u.grid());
  double out = 0.0;
  for (int k = k0; k <= k1; ++k) {
    gradient_central(u.at(k), g);
    out = std::max(out, max_norm(g));
  }
  return out;
}

double time_trapezoid(const std::vector<double>& values, double dt, int k0, int k1) {
  if (k1 <= k0) return 0.0;
  double s = 0.5 * (values[static_cast<std::size_t>(k0)] + values[static_cast<std::size_t>(k1)]);
  for (int k = k0 + 1; k < k1; ++k) s += values[static_cast<std::size_t>(k)];
  return s * dt;
}

}  // namespace mfg
