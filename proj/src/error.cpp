#include "castrank/error.hpp"

namespace castrank {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DuplicateFrame: return "DuplicateFrame";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::AssignmentMismatch: return "AssignmentMismatch";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::UnknownCluster: return "UnknownCluster";
    case ErrorCode::InvalidWeights: return "InvalidWeights";
    case ErrorCode::NonFiniteScore: return "NonFiniteScore";
    case ErrorCode::TooFewVideos: return "TooFewVideos";
    case ErrorCode::DegenerateLabels: return "DegenerateLabels";
    case ErrorCode::NoPositives: return "NoPositives";
    case ErrorCode::ZeroBaseline: return "ZeroBaseline";
    case ErrorCode::CenterSamplingFailed: return "CenterSamplingFailed";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

bool is_validation_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedRecord:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::DuplicateFrame:
    case ErrorCode::AssignmentMismatch:
    case ErrorCode::InvalidWeights:
    case ErrorCode::InvalidArgument:
    case ErrorCode::ConfigError:
      return true;
    default:
      return false;
  }
}

}  // namespace castrank
