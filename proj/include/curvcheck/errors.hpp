#pragma once

#include <stdexcept>
#include <string>

namespace curvcheck {

class SingularMetricError : public std::runtime_error {
 public:
  SingularMetricError(const std::string& what, double condition)
      : std::runtime_error(what), condition_(condition) {}
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

class OutOfChartError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class FrameDegenerateError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Two independent routes to the same quantity disagreed; signals a bug.
class ConsistencyError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class ZeroFieldError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class DimensionError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class NotTorseFormingError : public std::runtime_error {
 public:
  NotTorseFormingError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace curvcheck
