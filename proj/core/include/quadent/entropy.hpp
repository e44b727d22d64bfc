#pragma once

#include "quadent/phase_space.hpp"

namespace quadent {

/// ln(e/2) = 1 - ln 2, the per-mode gap between S_as and S2.
inline constexpr double kLnHalfE = 0.30685281944005469;

struct EntropyReport {
  double s_vn = 0.0;
  double s_r2 = 0.0;
  double s_as = 0.0;
  int modes = 0;
};

/// Entropy of one thermal mode with symplectic eigenvalue nu >= 1.
double mode_entropy(double nu);

double von_neumann_entropy(const CovarianceMatrix& g);
double renyi2_entropy(const CovarianceMatrix& g);
/// 1/2 ln det(e G / 2); defined on the whole positive-definite cone.
double asymptotic_entropy(const SpdMatrix& g);

/// Computes all three entropies and enforces S2 <= S <= S_as together with the
/// near-saturation bound S_as - S <= (N / nu_min^2) ln(e/2). Throws CorridorViolation.
EntropyReport corridor_check(const CovarianceMatrix& g, double slack = 1e-9);

double mutual_information(const CovarianceMatrix& g, const ModeCount& split);
double mutual_information(const CovarianceMatrix& g, const SubsystemSpec& a, const SubsystemSpec& b);
double mutual_information_asymptotic(const SpdMatrix& g, const ModeCount& split);
double mutual_information_asymptotic(const SpdMatrix& g, const SubsystemSpec& a, const SubsystemSpec& b);

}  // namespace quadent
