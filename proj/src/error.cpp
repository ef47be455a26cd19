#include "ftrs/error.hpp"

namespace ftrs {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoTicketRegion: return "NoTicketRegion";
    case ErrorCode::UnknownCategory: return "UnknownCategory";
    case ErrorCode::EmptyRaster: return "EmptyRaster";
    case ErrorCode::ClassifierUnavailable: return "ClassifierUnavailable";
    case ErrorCode::InvalidClassCount: return "InvalidClassCount";
    case ErrorCode::BackendFailure: return "BackendFailure";
    case ErrorCode::MissingNameRegion: return "MissingNameRegion";
    case ErrorCode::MissingTC: return "MissingTC";
    case ErrorCode::StoreUnavailable: return "StoreUnavailable";
    case ErrorCode::UnknownRecord: return "UnknownRecord";
    case ErrorCode::StaleVersion: return "StaleVersion";
    case ErrorCode::EmptyEvaluation: return "EmptyEvaluation";
    case ErrorCode::Underdetermined: return "Underdetermined";
    case ErrorCode::InvalidWeights: return "InvalidWeights";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
  }
  return "Unknown";
}

}  // namespace ftrs
