#include "quadent/entropy.hpp"

#include <algorithm>
#include <cmath>

namespace quadent {

double mode_entropy(double nu) {
  if (!(nu >= 1.0 - 1e-9)) throw Error(ErrorCode::UncertaintyViolated, "symplectic eigenvalue below 1");
  const double x = 0.5 * (nu - 1.0);
  if (x <= 0.0) return 0.0;
  if (nu - 1.0 < 1e-6) {
    // (1+x)ln(1+x) - x ln x expanded around x = 0.
    return x - x * std::log(x) + 0.5 * x * x;
  }
  // Same as (1+x)ln(1+x) - x ln x without cancellation for large x.
  return std::log1p(x) + x * std::log1p(1.0 / x);
}

double von_neumann_entropy(const CovarianceMatrix& g) {
  double s = 0.0;
  for (double nu : williamson_spectrum(g)) s += mode_entropy(nu);
  return s;
}

double renyi2_entropy(const CovarianceMatrix& g) { return 0.5 * g.spd().log_det(); }

double asymptotic_entropy(const SpdMatrix& g) { return 0.5 * g.log_det() + g.modes() * kLnHalfE; }

EntropyReport corridor_check(const CovarianceMatrix& g, double slack) {
  const auto nu = williamson_spectrum(g);
  EntropyReport r;
  r.modes = g.modes();
  for (double v : nu) r.s_vn += mode_entropy(v);
  r.s_r2 = renyi2_entropy(g);
  r.s_as = asymptotic_entropy(g.spd());
  const double nu_min = *std::min_element(nu.begin(), nu.end());
  const bool ordered = r.s_r2 <= r.s_vn + slack && r.s_vn <= r.s_as + slack;
  const bool near_saturation = r.s_as - r.s_vn <= r.modes * kLnHalfE / (nu_min * nu_min) + slack;
  if (!ordered || !near_saturation) throw CorridorViolation(r.s_vn, r.s_r2, r.s_as, r.modes);
  return r;
}

double mutual_information(const CovarianceMatrix& g, const SubsystemSpec& a, const SubsystemSpec& b) {
  return von_neumann_entropy(restrict(g, a)) + von_neumann_entropy(restrict(g, b)) -
         von_neumann_entropy(g);
}

double mutual_information(const CovarianceMatrix& g, const ModeCount& split) {
  if (split.total() != g.modes()) throw Error(ErrorCode::DimensionMismatch, "split does not match G");
  return mutual_information(g, SubsystemSpec::first(split), SubsystemSpec::second(split));
}

double mutual_information_asymptotic(const SpdMatrix& g, const SubsystemSpec& a, const SubsystemSpec& b) {
  return asymptotic_entropy(restrict(g, a)) + asymptotic_entropy(restrict(g, b)) - asymptotic_entropy(g);
}

double mutual_information_asymptotic(const SpdMatrix& g, const ModeCount& split) {
  if (split.total() != g.modes()) throw Error(ErrorCode::DimensionMismatch, "split does not match G");
  return mutual_information_asymptotic(g, SubsystemSpec::first(split), SubsystemSpec::second(split));
}

}  // namespace quadent
