#include "quadent/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "quadent/subsystem_exponent.hpp"

namespace quadent {

namespace {

[[noreturn]] void config_fail(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

using Params = std::map<std::string, double>;

double param(const Params& given, const Params& defaults, const std::string& key) {
  const auto it = given.find(key);
  return it != given.end() ? it->second : defaults.at(key);
}

int integer_param(const Params& given, const Params& defaults, const std::string& key, int lo, int hi) {
  const double v = param(given, defaults, key);
  if (v != std::floor(v) || v < lo || v > hi) {
    config_fail("builtin parameter '" + key + "' must be an integer in [" + std::to_string(lo) + ", " +
                std::to_string(hi) + "]");
  }
  return static_cast<int>(v);
}

Matrix inverted_pair(double k1, double k2, double g) {
  Matrix h = Matrix::Zero(4, 4);
  h(0, 0) = -k1 * k1;
  h(1, 1) = 1.0;
  h(2, 2) = -k2 * k2;
  h(3, 3) = 1.0;
  h(0, 2) = h(2, 0) = g;
  return h;
}

// Harmonic chain with on-site frequency omega and position coupling -c between neighbours;
// unstable once 2 c cos(pi / (n + 1)) > omega^2.
Matrix coupled_chain(int n, double omega, double c) {
  Matrix h = Matrix::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    h(2 * i, 2 * i) = omega * omega;
    h(2 * i + 1, 2 * i + 1) = 1.0;
    if (i + 1 < n) h(2 * i, 2 * i + 2) = h(2 * i + 2, 2 * i) = -c;
  }
  return h;
}

Matrix metastable(double s) {
  Matrix h = Matrix::Zero(4, 4);
  h(1, 2) = h(2, 1) = s;
  return h;
}

Matrix two_mode_squeezer(double kappa) {
  Matrix h = Matrix::Zero(4, 4);
  h(0, 2) = h(2, 0) = kappa;
  h(1, 3) = h(3, 1) = -kappa;
  return h;
}

QuadraticHamiltonian with_linear(Matrix h, const Vector& f) {
  if (f.size() != 0 && f.size() != h.rows()) config_fail("hamiltonian.linear length must be twice the mode count");
  return QuadraticHamiltonian::constant(std::move(h), f);
}

QuadraticHamiltonian builtin(const HamiltonianSpec& spec) {
  const auto& registry = builtin_hamiltonians();
  const auto it = std::find_if(registry.begin(), registry.end(),
                               [&](const BuiltinHamiltonian& b) { return b.name == spec.builtin; });
  if (it == registry.end()) {
    std::string names;
    for (const auto& b : registry) names += (names.empty() ? "" : ", ") + b.name;
    config_fail("unknown builtin Hamiltonian '" + spec.builtin + "' (known: " + names + ")");
  }
  for (const auto& [key, value] : spec.params) {
    if (!it->defaults.count(key)) config_fail("builtin '" + spec.builtin + "' has no parameter '" + key + "'");
    if (!std::isfinite(value)) config_fail("builtin parameter '" + key + "' is not finite");
  }
  const Params& d = it->defaults;
  const Params& p = spec.params;
  const std::string& name = spec.builtin;
  if (name == "inverted_pair") {
    return with_linear(inverted_pair(param(p, d, "kappa1"), param(p, d, "kappa2"), param(p, d, "coupling")), spec.linear);
  }
  if (name == "coupled_chain") {
    return with_linear(coupled_chain(integer_param(p, d, "modes", 2, 6), param(p, d, "omega"), param(p, d, "coupling")),
                       spec.linear);
  }
  if (name == "metastable") return with_linear(metastable(param(p, d, "strength")), spec.linear);
  if (name == "two_mode_squeezer") return with_linear(two_mode_squeezer(param(p, d, "kappa")), spec.linear);
  if (name == "free_particle") {
    Matrix h = Matrix::Zero(2, 2);
    h(1, 1) = 1.0;
    return with_linear(h, spec.linear);
  }
  if (name == "parametric_drive") {
    const double omega = param(p, d, "omega");
    const double depth = param(p, d, "depth");
    const double g = param(p, d, "coupling");
    if (!(omega > 0.0)) config_fail("parametric_drive omega must be positive");
    const Vector f = spec.linear;
    if (f.size() != 0 && f.size() != 4) config_fail("hamiltonian.linear length must be twice the mode count");
    // Drive at 2 omega; the quoted period spans two drive cycles so the stroboscopic map
    // has positive multipliers inside the first resonance tongue.
    return QuadraticHamiltonian(
        2,
        [=](double t) {
          Matrix h = Matrix::Zero(4, 4);
          h(0, 0) = omega * omega * (1.0 + depth * std::cos(2.0 * omega * t));
          h(1, 1) = 1.0;
          h(2, 2) = omega * omega;
          h(3, 3) = 1.0;
          h(0, 2) = h(2, 0) = g;
          return h;
        },
        f.size() ? QuadraticHamiltonian::VectorFn([f](double) { return f; }) : QuadraticHamiltonian::VectorFn{},
        2.0 * std::numbers::pi / omega);
  }
  config_fail("builtin '" + name + "' has no constructor");
}

}  // namespace

const std::vector<BuiltinHamiltonian>& builtin_hamiltonians() {
  static const std::vector<BuiltinHamiltonian> registry{
      {"coupled_chain", "harmonic chain with attractive nearest-neighbour coupling; unstable for coupling > omega^2 / (2 cos(pi/(n+1)))",
       {{"modes", 4}, {"omega", 1.0}, {"coupling", 1.0}}},
      {"free_particle", "one free particle, h = diag(0, 1)", {}},
      {"inverted_pair", "two inverted oscillators with a position coupling", {{"kappa1", 1.0}, {"kappa2", 0.5}, {"coupling", 0.3}}},
      {"metastable", "(p1 q2 + q2 p1) / 2 scaled by strength; nilpotent generator", {{"strength", 1.0}}},
      {"parametric_drive", "mode 1 with modulated frequency omega^2 (1 + depth cos 2 omega t) coupled to a resonant mode 2",
       {{"omega", 1.0}, {"depth", 0.4}, {"coupling", 0.2}}},
      {"two_mode_squeezer", "kappa (q1 q2 - p1 p2)", {{"kappa", 0.25}}},
  };
  return registry;
}

QuadraticHamiltonian hamiltonian_from_spec(const HamiltonianSpec& spec) {
  switch (spec.kind) {
    case HamiltonianKind::Builtin:
      return builtin(spec);
    case HamiltonianKind::Constant:
      return with_linear(spec.constant, spec.linear);
    case HamiltonianKind::Fourier: {
      const FourierDrive drive = spec.fourier;
      const int n = static_cast<int>(drive.h0.rows() / 2);
      const Vector f = spec.linear;
      if (f.size() != 0 && f.size() != 2 * n) config_fail("hamiltonian.linear length must be twice the mode count");
      return QuadraticHamiltonian(
          n,
          [drive](double t) {
            Matrix h = drive.h0;
            for (size_t k = 0; k < drive.cos_terms.size(); ++k) {
              h += std::cos(static_cast<double>(k + 1) * drive.omega * t) * drive.cos_terms[k];
            }
            for (size_t k = 0; k < drive.sin_terms.size(); ++k) {
              h += std::sin(static_cast<double>(k + 1) * drive.omega * t) * drive.sin_terms[k];
            }
            return h;
          },
          f.size() ? QuadraticHamiltonian::VectorFn([f](double) { return f; }) : QuadraticHamiltonian::VectorFn{},
          2.0 * std::numbers::pi / drive.omega);
    }
    case HamiltonianKind::Piecewise: {
      const PiecewiseDrive drive = spec.piecewise;
      const int n = static_cast<int>(drive.segments.front().rows() / 2);
      double period = 0.0;
      for (double d : drive.durations) period += d;
      const Vector f = spec.linear;
      if (f.size() != 0 && f.size() != 2 * n) config_fail("hamiltonian.linear length must be twice the mode count");
      return QuadraticHamiltonian(
          n,
          [drive, period](double t) {
            double local = drive.periodic ? std::fmod(t, period) : t;
            for (size_t i = 0; i < drive.durations.size(); ++i) {
              if (local < drive.durations[i]) return drive.segments[i];
              local -= drive.durations[i];
            }
            return drive.segments.back();
          },
          f.size() ? QuadraticHamiltonian::VectorFn([f](double) { return f; }) : QuadraticHamiltonian::VectorFn{},
          drive.periodic ? std::optional<double>(period) : std::nullopt);
    }
  }
  config_fail("unknown Hamiltonian kind");
}

const std::vector<ScenarioInfo>& builtin_scenarios() {
  static const std::vector<ScenarioInfo> list{
      {"classical_counterexample", "free particle, mutual information of position and velocity grows like ln t"},
      {"coupled_chain", "four-mode unstable chain, subsystem = first two modes"},
      {"inverted_pair", "two coupled inverted oscillators, linear entanglement growth at the subsystem exponent"},
      {"metastable", "nilpotent generator: logarithmic growth and a bounded GSS right-hand side"},
      {"parametric_drive", "parametric resonance; exponents from the stroboscopic generator"},
      {"two_mode_squeezer", "truncated Fock oracle from the Fock vacuum against the Gaussian prediction and the squashed bounds"},
  };
  return list;
}

ScenarioConfig builtin_scenario(const std::string& name) {
  ScenarioConfig cfg;
  cfg.name = name;
  cfg.hamiltonian.kind = HamiltonianKind::Builtin;
  cfg.hamiltonian.builtin = name;
  const auto& list = builtin_scenarios();
  const auto it = std::find_if(list.begin(), list.end(), [&](const ScenarioInfo& s) { return s.name == name; });
  if (it == list.end()) config_fail("unknown scenario '" + name + "'");
  cfg.description = it->summary;
  if (name == "inverted_pair") {
    cfg.modes = 2;
    cfg.run.horizon = 600.0;
    cfg.run.dt = 0.05;
    cfg.run.samples = 200;
  } else if (name == "coupled_chain") {
    cfg.modes = 4;
    cfg.subsystem = {0, 1};
    cfg.run.horizon = 600.0;
    cfg.run.dt = 0.05;
    cfg.run.samples = 200;
  } else if (name == "metastable") {
    cfg.modes = 2;
    cfg.run.horizon = 1000.0;
    cfg.run.dt = 1.0;
    cfg.run.samples = 1000;
    cfg.run.log_growth = true;
    cfg.run.gss_times = {1.0, 10.0, 100.0, 1000.0};
  } else if (name == "parametric_drive") {
    cfg.modes = 2;
    const double tau = 2.0 * std::numbers::pi;
    cfg.run.horizon = 300.0 * tau;
    cfg.run.dt = tau / 100.0;
    cfg.run.samples = 300;
  } else if (name == "classical_counterexample") {
    cfg.modes = 1;
    cfg.hamiltonian.builtin = "free_particle";
    cfg.run.analysis = "classical_mi";
    cfg.run.eps = 0.1;
    cfg.run.horizon = 1e5;
    cfg.run.dt = 100.0;
    cfg.run.samples = 1000;
    cfg.run.window_start = 0.0;
    cfg.run.bounds = false;
  } else if (name == "two_mode_squeezer") {
    cfg.modes = 2;
    cfg.run.horizon = 12.0;
    cfg.run.dt = 0.01;
    cfg.run.samples = 120;
    cfg.state.kind = StateKind::Fock;
    cfg.state.fock_name = "vacuum";
    cfg.state.cutoff = 20;
    cfg.oracle.enabled = true;
    cfg.oracle.samples = 60;
    cfg.oracle.dt = 0.05;
  }
  return cfg;
}

double classical_counterexample_mi(double t, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
  return 0.5 * std::log1p(t * t * eps * eps);
}

double classical_mi_from_flow(const Matrix& m, double eps) {
  if (m.rows() != 2 || m.cols() != 2) throw Error(ErrorCode::DimensionMismatch, "classical flow must be 2x2");
  Matrix sigma0 = Matrix::Zero(2, 2);
  sigma0(0, 0) = 1.0;
  sigma0(1, 1) = eps * eps;
  const Matrix s = m * sigma0 * m.transpose();
  // det(M Sigma0 M^T) = det(M)^2 eps^2; forming it from s cancels once t eps is large.
  const double det_m = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  return 0.5 * (std::log(s(0, 0)) + std::log(s(1, 1))) - std::log(std::abs(det_m) * eps);
}

MetastableDemo metastable_demo(const std::vector<double>& times) {
  MetastableDemo demo;
  HamiltonianSpec spec;
  spec.builtin = "metastable";
  const auto ham = hamiltonian_from_spec(spec);
  const Matrix f = generator(ham, 0.0);
  const ModeCount split(2, 1);
  const auto vac = CovarianceMatrix::vacuum(2);
  const auto sub = SubsystemSpec::first(split);
  for (double t : times) {
    if (!(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "metastable_demo times must be positive");
    PropagationOptions opts;
    opts.samples = 1;
    const Matrix m = *propagate(ham, t, std::max(t / 4.0, 1e-3), opts).back().dense;
    MetastableRow row;
    row.t = t;
    row.exact_deviation = max_abs(m - (Matrix::Identity(4, 4) + t * f));
    row.s2_a = restricted_log_volume(sub, StretchFactor::from_dense(m), vac);
    row.s2_minus_ln_t = row.s2_a - std::log(t);
    const auto bound = gss_rhs_minimize(m, split);
    row.rhs_min = bound.value;
    row.rhs_status = bound.status;
    demo.max_exact_deviation = std::max(demo.max_exact_deviation, row.exact_deviation);
    if (t >= 10.0 && t <= 1000.0) demo.max_log_deviation = std::max(demo.max_log_deviation, std::abs(row.s2_minus_ln_t));
    demo.max_rhs = std::max(demo.max_rhs, row.rhs_min);
    demo.rows.push_back(row);
  }
  return demo;
}

}  // namespace quadent
