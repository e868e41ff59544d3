#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace isk {

// A requested system is too large for the selected engine (enumeration caps,
// martingale box caps). Callers are expected to switch engine, not retry.
class SizeError : public std::runtime_error {
 public:
  explicit SizeError(const std::string& what) : std::runtime_error(what) {}
};

// Iterative solver failed to converge; carries the iterate trajectory so the
// caller can inspect or report it.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> trajectory)
      : std::runtime_error(what), trajectory_(std::move(trajectory)) {}
  const std::vector<double>& trajectory() const { return trajectory_; }

 private:
  std::vector<double> trajectory_;
};

// Invalid user-facing configuration (CLI, config files, kernel specs).
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace isk
