#pragma once

#include <stdexcept>
#include <string>

namespace fracchemo {

/// Raised when an argument or parameter combination violates a documented range.
class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised when a computation produces or receives non-finite values.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what, double time = 0.0)
      : std::runtime_error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Raised by the Picard harness when no horizon above dt_min contracts.
class ContractionFailure : public std::runtime_error {
 public:
  explicit ContractionFailure(const std::string& what) : std::runtime_error(what) {}
};

/// Raised for unreadable or malformed configuration and data files.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ParameterError(message);
}

}  // namespace fracchemo
