#include "sortition/error.hpp"

namespace sortition {

const char* code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return "PARSE";
    case ErrorCode::kIo: return "IO";
    case ErrorCode::kBlankValue: return "BLANK_VALUE";
    case ErrorCode::kDuplicateId: return "DUPLICATE_ID";
    case ErrorCode::kInadmissibleValue: return "INADMISSIBLE_VALUE";
    case ErrorCode::kUnknownFeature: return "UNKNOWN_FEATURE";
    case ErrorCode::kBadScheme: return "BAD_SCHEME";
    case ErrorCode::kBadQuota: return "BAD_QUOTA";
    case ErrorCode::kInfeasibleQuotas: return "INFEASIBLE_QUOTAS";
    case ErrorCode::kInvalidPanel: return "INVALID_PANEL";
    case ErrorCode::kCapExceeded: return "CAP_EXCEEDED";
    case ErrorCode::kNoValidPanel: return "NO_VALID_PANEL";
    case ErrorCode::kStructuralExclusion: return "STRUCTURAL_EXCLUSION";
    case ErrorCode::kNoncoalitionExclusion: return "NONCOALITION_EXCLUSION";
    case ErrorCode::kRestrictionViolation: return "RESTRICTION_VIOLATION";
    case ErrorCode::kNonconverged: return "NONCONVERGED";
    case ErrorCode::kRestartLimit: return "RESTART_LIMIT";
    case ErrorCode::kBudgetExceeded: return "BUDGET_EXCEEDED";
    case ErrorCode::kZeroShare: return "ZERO_SHARE";
    case ErrorCode::kDomain: return "DOMAIN";
  }
  return "UNKNOWN";
}

}  // namespace sortition
