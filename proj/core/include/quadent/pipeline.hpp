#pragma once

#include <optional>
#include <string>
#include <vector>

#include "quadent/config.hpp"
#include "quadent/entropy.hpp"
#include "quadent/fock_oracle.hpp"
#include "quadent/lyapunov.hpp"
#include "quadent/ssa_bounds.hpp"
#include "quadent/subsystem_exponent.hpp"

namespace quadent {

/// Entropies of F M G0 M^T F^T from the stretch factor of M, without forming
/// the covariance. Symplectic eigenvalues below 1 by roundoff count as 1.
EntropyReport restricted_entropies(const StretchFactor& m, const CovarianceMatrix& g0, const SubsystemSpec& sub);

/// Which pipeline stages run; later stages need the earlier ones.
struct RunStages {
  bool exponents = true;
  bool entropies = true;
  bool bounds = true;
  /// Runs the Fock oracle even when the config leaves it disabled (Fock states only).
  bool force_oracle = false;
};

struct CsvRow {
  double t = 0.0;
  double s_vn_a = 0.0;
  double s2_a = 0.0;
  double s_as_a = 0.0;
  double i_ab = 0.0;
  double lambda_alg = 0.0;
  double lambda_vol = 0.0;
  double bound_lower = 0.0;
  double bound_upper = 0.0;
  std::string source = "gaussian";  // gaussian | fock | classical
  bool trusted = true;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct RunWarning {
  std::string stage;
  std::string code;
  std::string message;
};

struct GssPoint {
  double t = 0.0;
  double value = 0.0;
  BoundStatus status = BoundStatus::Converged;
  std::string start;
  int iterations = 0;
};

struct RunReport {
  std::string scenario;
  std::string config_hash;
  int modes = 0;
  std::vector<int> subsystem;
  double horizon = 0.0;
  double max_defect = 0.0;
  std::optional<LyapunovData> lyapunov;
  std::optional<RegularityVerdict> regularity;
  std::optional<ExponentReport> algebraic;
  std::optional<ExponentReport> volumetric;
  /// Real parts of the stroboscopic generator's eigenvalues, descending.
  std::vector<double> floquet_exponents;
  std::optional<double> floquet_lambda;
  std::optional<LinearFit> entropy_fit;  // S_vn(A) against t over the window
  std::optional<LinearFit> log_fit;      // S2(A) against ln t
  std::optional<LinearFit> lower_fit;
  std::optional<LinearFit> upper_fit;
  std::vector<GssPoint> gss;
  std::optional<GrowthVerification> oracle;
  std::vector<CsvRow> rows;
  std::vector<CheckResult> checks;
  std::vector<RunWarning> warnings;

  bool passed() const;
};

/// propagate -> Lyapunov -> exponents -> entropies -> bounds -> optional oracle.
/// Module errors become warnings and skip dependent checks; partial results stay.
/// Throws ConfigError for configs that cannot be built at all.
RunReport run_scenario(const ScenarioConfig& cfg, const RunStages& stages = {});

/// Initial Fock state described by a Fock state spec. Throws ConfigError.
FockState fock_state_from_spec(const StateSpec& spec, int n_modes);

}  // namespace quadent
