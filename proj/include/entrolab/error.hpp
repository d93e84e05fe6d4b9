#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace entrolab {

enum class ErrorKind {
  EmptySpace,
  MetricAsymmetric,
  TriangleViolation,
  InvalidEntry,
  InvalidHorizon,
  IndexOutOfRange,
  SpaceMismatch,
  InvalidCover,
  ExactBudgetExceeded,
  EmptySubset,
  InvalidRates,
  WindowEmpty,
  InsufficientGrid,
  InvalidGrain,
  NotAPreorder,
  NotMonotone,
  SignatureMismatch,
  CodomainMismatch,
  AdjointMissing,
  PreconditionFailed,
  ParamOutOfRange,
  FileMalformed,
  IoError,
  ConfigError,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptySpace: return "EmptySpace";
    case ErrorKind::MetricAsymmetric: return "MetricAsymmetric";
    case ErrorKind::TriangleViolation: return "TriangleViolation";
    case ErrorKind::InvalidEntry: return "InvalidEntry";
    case ErrorKind::InvalidHorizon: return "InvalidHorizon";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::SpaceMismatch: return "SpaceMismatch";
    case ErrorKind::InvalidCover: return "InvalidCover";
    case ErrorKind::ExactBudgetExceeded: return "ExactBudgetExceeded";
    case ErrorKind::EmptySubset: return "EmptySubset";
    case ErrorKind::InvalidRates: return "InvalidRates";
    case ErrorKind::WindowEmpty: return "WindowEmpty";
    case ErrorKind::InsufficientGrid: return "InsufficientGrid";
    case ErrorKind::InvalidGrain: return "InvalidGrain";
    case ErrorKind::NotAPreorder: return "NotAPreorder";
    case ErrorKind::NotMonotone: return "NotMonotone";
    case ErrorKind::SignatureMismatch: return "SignatureMismatch";
    case ErrorKind::CodomainMismatch: return "CodomainMismatch";
    case ErrorKind::AdjointMissing: return "AdjointMissing";
    case ErrorKind::PreconditionFailed: return "PreconditionFailed";
    case ErrorKind::ParamOutOfRange: return "ParamOutOfRange";
    case ErrorKind::FileMalformed: return "FileMalformed";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-checkable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace entrolab
