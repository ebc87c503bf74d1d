#include "scrforge/error.h"

namespace scrforge {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kBehindCamera: return "BehindCamera";
    case ErrorCode::kNonPositiveDepth: return "NonPositiveDepth";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kMissingProperty: return "MissingProperty";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kEmptyIndex: return "EmptyIndex";
    case ErrorCode::kEmptyCloud: return "EmptyCloud";
    case ErrorCode::kDegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::kNoRealSolution: return "NoRealSolution";
    case ErrorCode::kTooFewCorrespondences: return "TooFewCorrespondences";
    case ErrorCode::kTooFewPoints: return "TooFewPoints";
    case ErrorCode::kDegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorCode::kNoCorrespondences: return "NoCorrespondences";
    case ErrorCode::kEmptyList: return "EmptyList";
    case ErrorCode::kEmptyPool: return "EmptyPool";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kSamplingExhausted: return "SamplingExhausted";
    case ErrorCode::kConfigError: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code) {}

}  // namespace scrforge
