#pragma once

#include <stdexcept>
#include <string>

namespace sortition {

enum class ErrorCode {
  kParse,
  kIo,
  kBlankValue,
  kDuplicateId,
  kInadmissibleValue,
  kUnknownFeature,
  kBadScheme,
  kBadQuota,
  kInfeasibleQuotas,
  kInvalidPanel,
  kCapExceeded,
  kNoValidPanel,
  kStructuralExclusion,
  kNoncoalitionExclusion,
  kRestrictionViolation,
  kNonconverged,
  kRestartLimit,
  kBudgetExceeded,
  kZeroShare,
  kDomain,
};

// Stable upper-snake-case name, e.g. "DUPLICATE_ID".
const char* code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sortition
