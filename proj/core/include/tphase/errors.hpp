#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tphase {

/// Failure categories raised by the library. The CLI maps `kFormat`,
/// `kInvalidArgument` and `kIo` to exit status 2 and everything else to 1.
enum class ErrorCode {
  kInvalidArgument,
  kDimensionMismatch,
  kFormat,
  kSingularTensor,
  kNotSectorial,
  kBranchSpread,
  kBranchCut,
  kNotAccretive,
  kNotHermitian,
  kNotInSector,
  kQuadratureNotConverged,
  kPoleAtFrequency,
  kUnstable,
  kIllPosed,
  kIo,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tphase
