#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace scrforge {

// Domain failure categories. The CLI maps every one of these to exit code 1.
enum class ErrorCode {
  kBehindCamera,
  kNonPositiveDepth,
  kInvalidArgument,
  kParseError,
  kMissingProperty,
  kLengthMismatch,
  kEmptyIndex,
  kEmptyCloud,
  kDegenerateGeometry,
  kNoRealSolution,
  kTooFewCorrespondences,
  kTooFewPoints,
  kDegenerateConfiguration,
  kNoCorrespondences,
  kEmptyList,
  kEmptyPool,
  kIoError,
  kSamplingExhausted,
  kConfigError,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace scrforge
