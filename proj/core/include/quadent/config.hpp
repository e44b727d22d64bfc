#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "quadent/phase_space.hpp"

namespace quadent {

enum class HamiltonianKind { Builtin, Constant, Fourier, Piecewise };

/// h(t) = h0 + sum_k cos(k omega t) cos_terms[k-1] + sin(k omega t) sin_terms[k-1].
struct FourierDrive {
  double omega = 1.0;
  Matrix h0;
  std::vector<Matrix> cos_terms;
  std::vector<Matrix> sin_terms;
};

/// Piecewise-constant h; repeats with period sum(durations) when `periodic`.
struct PiecewiseDrive {
  std::vector<double> durations;
  std::vector<Matrix> segments;
  bool periodic = true;
};

struct HamiltonianSpec {
  HamiltonianKind kind = HamiltonianKind::Builtin;
  std::string builtin;
  std::map<std::string, double> params;  // builtin parameters; missing keys take defaults
  Matrix constant;
  FourierDrive fourier;
  PiecewiseDrive piecewise;
  Vector linear;  // f, constant in time; empty when absent
};

enum class StateKind { Gaussian, Fock };

struct FockTerm {
  std::vector<int> occupations;
  double re = 0.0;
  double im = 0.0;
};

struct StateSpec {
  StateKind kind = StateKind::Gaussian;
  Matrix covariance;  // empty = vacuum
  std::string fock_name = "vacuum";  // vacuum | basis | coherent | cat | superposition
  std::vector<int> occupations;
  std::vector<double> alpha;  // (re, im) pairs per mode for coherent; first pair for cat
  int cat_mode = 0;
  std::vector<FockTerm> terms;
  int cutoff = 20;
};

struct RunSpec {
  double horizon = 40.0;
  double dt = 0.01;
  int samples = 100;
  double window_start = 0.5;
  bool bounds = true;
  /// Times at which the GSS right-hand side is minimized; empty = none.
  std::vector<double> gss_times;
  /// Fit S2(A) against ln t instead of t (polynomial growth scenarios).
  bool log_growth = false;
  /// "quantum", or "classical_mi" for the classical position/velocity counterexample.
  std::string analysis = "quantum";
  /// Velocity spread of the classical counterexample.
  double eps = 0.1;
};

struct OracleSpec {
  bool enabled = false;
  double horizon = 0.0;  // 0 = run.horizon
  double dt = 0.01;
  int samples = 100;
  double leak_ceiling = 1e-6;
  long long max_dimension = 2048;
};

struct OutputSpec {
  std::string csv;
  std::string report;
  std::string json;
};

struct ToleranceSpec {
  double defect_ceiling = 1e-8;
  double lyapunov_threshold = 1e-3;
  /// Relative agreement between algebraic and volumetric exponents.
  double exponent_rel = 0.02;
  /// Relative agreement between the entropy slope and Lambda_A.
  double slope_rel = 0.05;
  double oracle_rel = 0.10;
  double corridor_slack = 1e-9;
};

struct ScenarioConfig {
  std::string name = "custom";
  std::string description;
  int modes = 0;  // filled from the Hamiltonian
  HamiltonianSpec hamiltonian;
  std::vector<int> subsystem{0};
  StateSpec state;
  RunSpec run;
  OracleSpec oracle;
  OutputSpec output;
  ToleranceSpec tolerances;
};

/// Parses the JSON config grammar documented in the README. `origin` names the
/// source in diagnostics. Throws ConfigError with line or field path.
ScenarioConfig parse_config(const std::string& text, const std::string& origin = "<config>");

/// Same, after applying `key.path=value` overrides to the parsed tree. Values
/// are read as JSON literals and fall back to plain strings.
ScenarioConfig parse_config(const std::string& text, const std::vector<std::string>& overrides,
                            const std::string& origin = "<config>");

ScenarioConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// Canonical text with every field spelled out; parse(serialize(c)) == c.
std::string serialize_config(const ScenarioConfig& cfg);

/// Stable 64-bit FNV-1a of the canonical text without output paths, as 16 hex digits.
std::string config_hash(const ScenarioConfig& cfg);

}  // namespace quadent
