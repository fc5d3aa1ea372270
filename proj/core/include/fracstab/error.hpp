#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fracstab {

enum class ErrorCode {
  OrderOutOfRange,
  NonFiniteEntry,
  BadForcingTable,
  BadNonlinearity,
  BadConfig,
  NotReducible,
  Beta4EqualsTwo,
  InternalContradiction,
  CriterionOracleMismatch,
  ZeroOnAxis,
  ZeroAtOrigin,
  SamplingInconclusive,
  NewtonDivergence,
  StepTooLarge,
  BadSolverConfig,
};

[[nodiscard]] std::string_view to_string(ErrorCode code) noexcept;

/// Every recoverable failure in the library is reported as an Error carrying
/// a machine-readable code plus a human-readable message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fracstab
