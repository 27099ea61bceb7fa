#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace thermoplate {

enum class ErrorKind {
  range,          // index outside the retained modes
  shape,          // size or domain mismatch
  domain,         // argument outside the mathematical domain (mu <= 0, ...)
  usage,          // API misuse (wrong operator kind, empty set, ...)
  admissibility,  // a(t) or f(t,s) violates its declared hypotheses
  hypothesis,     // a theorem hypothesis fails (eta > 2, ...)
  infeasible,     // constant selection has no admissible solution
  config,         // malformed experiment configuration
  blowup,         // non-finite values during time stepping
  io,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised by the integrator on the first non-finite coefficient.
class BlowUpError : public Error {
 public:
  BlowUpError(double time, std::size_t mode, const std::string& message)
      : Error(ErrorKind::blowup, message), time_(time), mode_(mode) {}

  double time() const noexcept { return time_; }
  std::size_t mode() const noexcept { return mode_; }

 private:
  double time_;
  std::size_t mode_;
};

}  // namespace thermoplate
