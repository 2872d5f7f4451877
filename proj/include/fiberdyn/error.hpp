#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fiberdyn {

enum class ErrorKind {
  BackwardNotInvertible,
  NotHyperbolic,
  EpsilonTooLarge,
  BudgetExceeded,
  EmptySample,
  PointsTooFar,
  SpacingTooSmall,
  NotAffine,
  InvalidArgument,
  InvalidConfig,
};

std::string_view error_kind_name(ErrorKind kind);

// Single exception type for the library; `kind()` is what callers branch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }
  std::string_view kind_name() const { return error_kind_name(kind_); }

 private:
  ErrorKind kind_;
};

// Config validation error that remembers the offending field.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string &message)
      : Error(ErrorKind::InvalidConfig, field + ": " + message),
        field_(std::move(field)) {}

  const std::string &field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace fiberdyn
