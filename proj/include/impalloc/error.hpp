#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace impalloc {

enum class ErrorCode {
  Empty,
  NonPositiveProbability,
  NotNormalized,
  RadixTooSmall,
  NegativeBudget,
  KindLengthMismatch,
  LengthCountMismatch,
  InvalidWeights,
  OutOfRange,
  InfeasiblePlan,
  BudgetExceedsCapacity,
  NoConvergence,
  InteriorConditionViolated,
  PreconditionBudgetTooSmall,
  DeltaOutOfRange,
  TargetUnreachable,
  SearchSpaceTooLarge,
  NoInteriorClass,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above; the
/// CLI maps them onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace impalloc
