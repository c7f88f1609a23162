#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mwl {

enum class ErrorKind {
  SingularRotation,
  AxisMismatch,
  DegenerateLine,
  NonFiniteState,
  ZeroNorm,
  RetryExhausted,
  DepthSingularity,
  ScaleDegenerate,
  InvalidArgument,
  ConfigError,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace mwl
