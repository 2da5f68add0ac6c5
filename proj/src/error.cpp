#include "netsmt/error.hpp"

namespace netsmt {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::DuplicateIdentifier: return "DuplicateIdentifier";
    case ErrorKind::UnknownPlaceInArc: return "UnknownPlaceInArc";
    case ErrorKind::EmptyNet: return "EmptyNet";
    case ErrorKind::NotSafe: return "NotSafe";
    case ErrorKind::StateLimitExceeded: return "StateLimitExceeded";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::WidthOverflow: return "WidthOverflow";
    case ErrorKind::SpawnFailure: return "SpawnFailure";
    case ErrorKind::UnparsableModel: return "UnparsableModel";
    case ErrorKind::MissingVariable: return "MissingVariable";
    case ErrorKind::ValueOutOfRange: return "ValueOutOfRange";
    case ErrorKind::ConflictDetected: return "ConflictDetected";
    case ErrorKind::InvalidPartition: return "InvalidPartition";
    case ErrorKind::SolverInconclusive: return "SolverInconclusive";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace netsmt
