#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace otcp {

// Error categories surfaced by the library. The numeric values are mirrored
// by otcp_status in the C API, so append only.
enum class ErrorCode {
  kInvalidArgument = 1,
  kDimensionMismatch = 2,
  kNonFiniteInput = 3,
  kInvalidDimension = 4,
  kInfeasibleDuals = 5,
  kLevelOutOfRange = 6,
  kCalibrationTooSmall = 7,
  kNeighborCountTooSmall = 8,
  kInvalidLabel = 9,
  kSingularCovariance = 10,
  kEmptyTestSet = 11,
  kTooFewTestPoints = 12,
  kDegenerateBox = 13,
  kIo = 14,
  kMalformedData = 15,
  kVersionMismatch = 16,
  kInvalidConfig = 17,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void Fail(ErrorCode code, const std::string& message);

inline void Require(bool condition, ErrorCode code, const char* message) {
  if (!condition) Fail(code, message);
}

}  // namespace otcp
