#pragma once

#include <map>
#include <string>
#include <vector>

#include "quadent/config.hpp"
#include "quadent/dynamics.hpp"
#include "quadent/ssa_bounds.hpp"

namespace quadent {

struct BuiltinHamiltonian {
  std::string name;
  std::string summary;
  std::map<std::string, double> defaults;
};

/// Registry of named quadratic Hamiltonians, sorted by name.
const std::vector<BuiltinHamiltonian>& builtin_hamiltonians();

/// Throws ConfigError for unknown names, unknown parameters or bad values.
QuadraticHamiltonian hamiltonian_from_spec(const HamiltonianSpec& spec);

struct ScenarioInfo {
  std::string name;
  std::string summary;
};

const std::vector<ScenarioInfo>& builtin_scenarios();

/// Ready-to-run config of a named scenario. Throws ConfigError.
ScenarioConfig builtin_scenario(const std::string& name);

/// Mutual information of position and velocity of a free particle started from
/// independent Gaussians with variances 1 and eps^2: 1/2 ln(1 + t^2 eps^2).
double classical_counterexample_mi(double t, double eps);

/// Same quantity from the evolved classical covariance, 1/2 ln(S_qq S_pp / det S).
double classical_mi_from_flow(const Matrix& m, double eps);

struct MetastableRow {
  double t = 0.0;
  double exact_deviation = 0.0;  // max |M(t) - (1 + t F)|
  double s2_a = 0.0;
  double s2_minus_ln_t = 0.0;
  double rhs_min = 0.0;
  BoundStatus rhs_status = BoundStatus::Converged;
};

struct MetastableDemo {
  std::vector<MetastableRow> rows;
  double max_exact_deviation = 0.0;
  /// Max |S2(A) - ln t| over rows with t in [10, 1000].
  double max_log_deviation = 0.0;
  double max_rhs = 0.0;
  double rhs_ceiling = 2.0 * kLnHalfE;
};

/// H = (p1 q2 + q2 p1) / 2 with vacuum G0: M(t) = 1 + t F exactly, S2(A) ~ ln t and
/// a bounded minimized GSS right-hand side.
MetastableDemo metastable_demo(const std::vector<double>& times);

}  // namespace quadent
