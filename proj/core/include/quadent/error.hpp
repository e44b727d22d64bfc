#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace quadent {

enum class ErrorCode {
  NotSymmetric,
  NotPositiveDefinite,
  UncertaintyViolated,
  DimensionMismatch,
  NotDarboux,
  NonSymmetricH,
  StepTooLarge,
  SingularM,
  NoRealLogarithm,
  NotConverged,
  RankDeficient,
  BudgetExhausted,
  NonHermitian,
  TruncationLeak,
  WindowTooShort,
  CorridorViolated,
  InvalidArgument,
  ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base exception for the library. The code names the failed check.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised when S2 <= S <= S2 + N ln(e/2) fails; carries the offending triple.
class CorridorViolation : public Error {
 public:
  CorridorViolation(double s_vn, double s_renyi2, double s_asymptotic, int modes);
  double von_neumann() const noexcept { return s_vn_; }
  double renyi2() const noexcept { return s_r2_; }
  double asymptotic() const noexcept { return s_as_; }

 private:
  double s_vn_;
  double s_r2_;
  double s_as_;
};

}  // namespace quadent
