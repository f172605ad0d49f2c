#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace shapeflow {

enum class ErrorKind {
  InvalidInput,
  DegenerateFlowTime,
  HypothesisViolated,
  NonConvexInput,
  SolveFailure,
  UnknownTag,
  UnsupportedKind,
  ConvexityLost,
  OriginEscaped,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the kinds above so that
/// callers (scans, the CLI) can route on it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace shapeflow
