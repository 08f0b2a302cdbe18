#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mfg {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fields living on different grids were combined.
class GridMismatchError : public Error {
 public:
  using Error::Error;
};

/// A time step produced non-finite values or violated a strict step-size check.
class StepSizeError : public Error {
 public:
  StepSizeError(const std::string& what, int step, double cfl)
      : Error(what), step_(step), cfl_(cfl) {}
  int step() const noexcept { return step_; }
  double cfl() const noexcept { return cfl_; }

 private:
  int step_;
  double cfl_;
};

/// An invariant that the discretization guarantees (mass, duality) was broken.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> residuals)
      : Error(what), residuals_(std::move(residuals)) {}
  const std::vector<double>& residual_history() const noexcept { return residuals_; }

 private:
  std::vector<double> residuals_;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : Error("config field '" + field + "': " + message), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class SnapshotError : public Error {
 public:
  SnapshotError(const std::string& file, std::size_t offset, const std::string& message)
      : Error(file + " (byte " + std::to_string(offset) + "): " + message),
        file_(file),
        offset_(offset) {}
  const std::string& file() const noexcept { return file_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::string file_;
  std::size_t offset_;
};

}  // namespace mfg
