#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace overload {

enum class Errc {
  TrialAlreadyOpen,
  NoOpenTrial,
  NonMonotonicTimestamp,
  StorageFailure,
  ArityMismatch,
  NonFiniteInput,
  EmptyCalibrationSet,
  InvalidArgument,
  AlreadyOffered,
  IllegalTransition,
  ClientTimeout,
  SelectionNotSubstring,
  InvalidPlan,
  MissingGroundTruth,
  EmptyCounts,
  NoPositives,
  NoOffers,
  ConstantColumn,
  InsufficientData,
  ConfigError,
  SchemaMismatch,
  IoError,
};

std::string_view to_string(Errc code);

// All library failures surface as this exception; `code()` identifies the
// contract that was violated.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace overload
