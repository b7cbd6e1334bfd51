#pragma once

#include <stdexcept>
#include <string>

namespace morphogrid {

enum class ErrorCode {
  // Bad input: malformed files, wrong arguments, too few landmarks.
  kInvalidArgument,
  kParse,
  kSchema,
  kHomology,
  kInsufficientLandmarks,
  // Numerical failure on otherwise well-formed input.
  kDegenerateConfiguration,
  kDegenerateBaseline,
  kCollinearTemplate,
  kCoincidentLandmarks,
  kSingularSystem,
  kRankDeficient,
  kNonConvergence,
  kOutsideDomain,
  kNonConvexSource,
  kDegenerateQuad,
  kVanishingLine,
  kZeroLengthSegment,
  kDegeneratePolygon,
  kDegenerateViewport,
};

/// True for codes that signal a problem with the caller's input rather than
/// a numerical breakdown. The CLI maps these to exit code 2, others to 3.
constexpr bool is_input_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kParse:
    case ErrorCode::kSchema:
    case ErrorCode::kHomology:
    case ErrorCode::kInsufficientLandmarks:
      return true;
    default:
      return false;
  }
}

const char* error_code_name(ErrorCode code);

class MorphoError : public std::runtime_error {
 public:
  MorphoError(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace morphogrid
