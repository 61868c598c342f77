#pragma once

#include <stdexcept>
#include <string>

namespace shiftconc {

enum class ErrorKind {
  invalid_argument,
  resource_limit,
  incomplete_spec,
  empty_population,
  numerical_inconsistency,
  config_parse,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::resource_limit: return "resource-limit";
    case ErrorKind::incomplete_spec: return "incomplete-spec";
    case ErrorKind::empty_population: return "empty-population";
    case ErrorKind::numerical_inconsistency: return "numerical-inconsistency";
    case ErrorKind::config_parse: return "config-parse";
  }
  return "unknown";
}

// Every library failure is reported through this one exception type; the
// kind drives the CLI exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorKind::invalid_argument, what);
}

// Carries both disagreeing values so callers can report them.
class NumericalInconsistency : public Error {
 public:
  NumericalInconsistency(const std::string& what, double first, double second)
      : Error(ErrorKind::numerical_inconsistency,
              what + " (" + std::to_string(first) + " vs " + std::to_string(second) + ")"),
        first_(first),
        second_(second) {}

  double first() const noexcept { return first_; }
  double second() const noexcept { return second_; }

 private:
  double first_;
  double second_;
};

}  // namespace shiftconc
