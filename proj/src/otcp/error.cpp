#include "otcp/error.hpp"

namespace otcp {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNonFiniteInput: return "NonFiniteInput";
    case ErrorCode::kInvalidDimension: return "InvalidDimension";
    case ErrorCode::kInfeasibleDuals: return "InfeasibleDuals";
    case ErrorCode::kLevelOutOfRange: return "LevelOutOfRange";
    case ErrorCode::kCalibrationTooSmall: return "CalibrationTooSmall";
    case ErrorCode::kNeighborCountTooSmall: return "NeighborCountTooSmall";
    case ErrorCode::kInvalidLabel: return "InvalidLabel";
    case ErrorCode::kSingularCovariance: return "SingularCovariance";
    case ErrorCode::kEmptyTestSet: return "EmptyTestSet";
    case ErrorCode::kTooFewTestPoints: return "TooFewTestPoints";
    case ErrorCode::kDegenerateBox: return "DegenerateBox";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kMalformedData: return "MalformedData";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, std::string(ErrorCodeName(code)) + ": " + message);
}

}  // namespace otcp
