#include "quadent/error.hpp"

#include <cstdio>

namespace quadent {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::UncertaintyViolated: return "UncertaintyViolated";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotDarboux: return "NotDarboux";
    case ErrorCode::NonSymmetricH: return "NonSymmetricH";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::SingularM: return "SingularM";
    case ErrorCode::NoRealLogarithm: return "NoRealLogarithm";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::BudgetExhausted: return "BudgetExhausted";
    case ErrorCode::NonHermitian: return "NonHermitian";
    case ErrorCode::TruncationLeak: return "TruncationLeak";
    case ErrorCode::WindowTooShort: return "WindowTooShort";
    case ErrorCode::CorridorViolated: return "CorridorViolated";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

namespace {
std::string corridor_message(double s_vn, double s_r2, double s_as, int modes) {
  char buf[200];
  std::snprintf(buf, sizeof buf, "S2=%.17g S=%.17g Sas=%.17g (N=%d)", s_r2, s_vn, s_as, modes);
  return buf;
}
}  // namespace

CorridorViolation::CorridorViolation(double s_vn, double s_renyi2, double s_asymptotic, int modes)
    : Error(ErrorCode::CorridorViolated, corridor_message(s_vn, s_renyi2, s_asymptotic, modes)),
      s_vn_(s_vn),
      s_r2_(s_renyi2),
      s_as_(s_asymptotic) {}

}  // namespace quadent
