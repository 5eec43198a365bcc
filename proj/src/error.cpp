#include "overload/error.hpp"

namespace overload {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::TrialAlreadyOpen: return "TrialAlreadyOpen";
    case Errc::NoOpenTrial: return "NoOpenTrial";
    case Errc::NonMonotonicTimestamp: return "NonMonotonicTimestamp";
    case Errc::StorageFailure: return "StorageFailure";
    case Errc::ArityMismatch: return "ArityMismatch";
    case Errc::NonFiniteInput: return "NonFiniteInput";
    case Errc::EmptyCalibrationSet: return "EmptyCalibrationSet";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::AlreadyOffered: return "AlreadyOffered";
    case Errc::IllegalTransition: return "IllegalTransition";
    case Errc::ClientTimeout: return "ClientTimeout";
    case Errc::SelectionNotSubstring: return "SelectionNotSubstring";
    case Errc::InvalidPlan: return "InvalidPlan";
    case Errc::MissingGroundTruth: return "MissingGroundTruth";
    case Errc::EmptyCounts: return "EmptyCounts";
    case Errc::NoPositives: return "NoPositives";
    case Errc::NoOffers: return "NoOffers";
    case Errc::ConstantColumn: return "ConstantColumn";
    case Errc::InsufficientData: return "InsufficientData";
    case Errc::ConfigError: return "ConfigError";
    case Errc::SchemaMismatch: return "SchemaMismatch";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace overload
