#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace poslab {

enum class ErrorCode {
  kDuplicateMinerId,
  kZeroTotalStake,
  kMissingLotteryParams,
  kInvalidParameter,
  kZeroTotalWeight,
  kMalformedWeights,
  kEmptyParticipantSet,
  kIndivisibleStake,
  kDegenerateTest,
  kUnknownAttackerId,
  kParseError,
  kIoError,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  // Scenario-level failures (as opposed to parse or I/O failures).
  bool is_validation() const noexcept {
    return code_ != ErrorCode::kParseError && code_ != ErrorCode::kIoError;
  }

 private:
  ErrorCode code_;
};

}  // namespace poslab
