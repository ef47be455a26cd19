#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ftrs {

enum class ErrorCode {
  NoTicketRegion,
  UnknownCategory,
  EmptyRaster,
  ClassifierUnavailable,
  InvalidClassCount,
  BackendFailure,
  MissingNameRegion,
  MissingTC,
  StoreUnavailable,
  UnknownRecord,
  StaleVersion,
  EmptyEvaluation,
  Underdetermined,
  InvalidWeights,
  InvalidArgument,
  InvalidConfig,
  SchemaViolation,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ftrs
