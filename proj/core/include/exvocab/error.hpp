#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace exvocab {

enum class ErrorCode {
  kInvalidArgument,
  kParse,
  kIo,
  kEmptyCorpus,
  kYearOutOfRange,
  kShapeMismatch,
  kMissingTotals,
  kNonIntegerCell,
  kWordUnknown,
  kMissingYear,
  kSetsOverlap,
  kPoolExhausted,
  kSizeCap,
  kInvalidPattern,
};

std::string_view error_code_name(ErrorCode code);

// All library failures are reported as Error; the code lets callers (and the
// CLI's exit-status mapping) distinguish the cause without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace exvocab
