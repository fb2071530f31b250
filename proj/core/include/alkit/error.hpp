#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace alkit {

enum class ErrorKind {
  InvalidArgument,
  BadMagic,
  Truncated,
  LabelOutOfRange,
  CountMismatch,
  InfeasibleSplit,
  SeedNotDiverse,
  DimensionMismatch,
  NonFiniteLoss,
  OracleTimeout,
  UnknownId,
  MisalignedTraces,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a kind so callers (the CLI exit-code
/// table, the HTTP status mapping) can dispatch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace alkit
