#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace castrank {

enum class ErrorCode {
  MalformedRecord,
  DimensionMismatch,
  DuplicateFrame,
  LengthMismatch,
  ZeroVector,
  AssignmentMismatch,
  EmptyDataset,
  UnknownCluster,
  InvalidWeights,
  NonFiniteScore,
  TooFewVideos,
  DegenerateLabels,
  NoPositives,
  ZeroBaseline,
  CenterSamplingFailed,
  InvalidArgument,
  ConfigError,
  IoError,
};

std::string_view error_name(ErrorCode code);

/// True for errors caused by bad input files or configuration (CLI exit 2);
/// everything else is a runtime failure (CLI exit 3).
bool is_validation_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace castrank
