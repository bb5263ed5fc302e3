#include "tphase/errors.hpp"

namespace tphase {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kFormat: return "FormatError";
    case ErrorCode::kSingularTensor: return "SingularTensor";
    case ErrorCode::kNotSectorial: return "NotSectorial";
    case ErrorCode::kBranchSpread: return "BranchSpread";
    case ErrorCode::kBranchCut: return "BranchCut";
    case ErrorCode::kNotAccretive: return "NotAccretive";
    case ErrorCode::kNotHermitian: return "NotHermitian";
    case ErrorCode::kNotInSector: return "NotInSector";
    case ErrorCode::kQuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorCode::kPoleAtFrequency: return "PoleAtFrequency";
    case ErrorCode::kUnstable: return "Unstable";
    case ErrorCode::kIllPosed: return "IllPosed";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

}  // namespace tphase
