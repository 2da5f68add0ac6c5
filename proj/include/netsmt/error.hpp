#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace netsmt {

enum class ErrorKind {
  SyntaxError,
  DuplicateIdentifier,
  UnknownPlaceInArc,
  EmptyNet,
  NotSafe,
  StateLimitExceeded,
  BudgetExceeded,
  WidthOverflow,
  SpawnFailure,
  UnparsableModel,
  MissingVariable,
  ValueOutOfRange,
  ConflictDetected,
  InvalidPartition,
  SolverInconclusive,
  IoError,
};

std::string_view to_string(ErrorKind kind);

/// Domain error raised by every netsmt operation. The kind is the
/// machine-checkable part; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace netsmt
