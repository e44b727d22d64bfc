#include "quadent/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "quadent/scenarios.hpp"

namespace quadent {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Below this |Lambda_A| a run counts as non-growing and slope checks are skipped.
constexpr double kGrowthFloor = 1e-2;

double mode_entropy_from_log(double log_nu) {
  if (log_nu <= 0.0) return 0.0;
  // s(nu) = ln(nu / 2) + 1 + O(nu^-2).
  if (log_nu > 30.0) return log_nu - std::numbers::ln2 + 1.0;
  return mode_entropy(std::exp(log_nu));
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Rows map the reordered quadratures (subsystem modes first) to the original ones.
Matrix mode_permutation(int n, const std::vector<int>& first) {
  std::vector<int> order = first;
  for (int m = 0; m < n; ++m) {
    if (std::find(first.begin(), first.end(), m) == first.end()) order.push_back(m);
  }
  Matrix p = Matrix::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    p(2 * i, 2 * order[static_cast<size_t>(i)]) = 1.0;
    p(2 * i + 1, 2 * order[static_cast<size_t>(i)] + 1) = 1.0;
  }
  return p;
}

QuadraticHamiltonian permuted(const QuadraticHamiltonian& h, const Matrix& p) {
  if (h.is_constant()) {
    Vector f;
    if (h.has_linear_term()) f = p * h.f(0.0);
    return QuadraticHamiltonian::constant(p * h.h(0.0) * p.transpose(), f);
  }
  QuadraticHamiltonian::VectorFn f;
  if (h.has_linear_term()) f = [h, p](double t) -> Vector { return p * h.f(t); };
  return QuadraticHamiltonian(
      h.modes(), [h, p](double t) -> Matrix { return p * h.h(t) * p.transpose(); }, f, h.period());
}

class Recorder {
 public:
  explicit Recorder(RunReport& r) : r_(r) {}

  void warn(const std::string& stage, const std::exception& e) {
    const auto* err = dynamic_cast<const Error*>(&e);
    r_.warnings.push_back({stage, err ? std::string(to_string(err->code())) : "Exception", e.what()});
  }

  void warn(const std::string& stage, const std::string& code, const std::string& message) {
    r_.warnings.push_back({stage, code, message});
  }

  void check(const std::string& name, bool passed, const std::string& detail) {
    r_.checks.push_back({name, passed, detail});
  }

 private:
  RunReport& r_;
};

std::vector<size_t> window_indices(const std::vector<double>& t, double begin, double end) {
  std::vector<size_t> out;
  for (size_t i = 0; i < t.size(); ++i) {
    if (t[i] >= begin - 1e-12 * std::max(1.0, end) && t[i] <= end + 1e-12 * std::max(1.0, end)) out.push_back(i);
  }
  return out;
}

std::optional<LinearFit> fit_window(const std::vector<double>& x, const std::vector<double>& y,
                                    const std::vector<size_t>& idx) {
  std::vector<double> wx, wy;
  for (size_t i : idx) {
    if (std::isfinite(y[i])) {
      wx.push_back(x[i]);
      wy.push_back(y[i]);
    }
  }
  if (wx.size() < 3) return std::nullopt;
  return fit_line(wx, wy);
}

bool relative_match(double value, double reference, double rel) {
  return std::abs(value - reference) <= rel * std::abs(reference);
}

void run_classical(const ScenarioConfig& cfg, const QuadraticHamiltonian& ham, RunReport& rep, Recorder& rec) {
  if (ham.modes() != 1) throw Error(ErrorCode::ConfigError, "classical_mi analysis needs a one-mode Hamiltonian");
  PropagationOptions opts;
  opts.samples = cfg.run.samples;
  opts.defect_ceiling = cfg.tolerances.defect_ceiling;
  const auto series = propagate(ham, cfg.run.horizon, cfg.run.dt, opts);
  rep.max_defect = series.max_defect();
  rec.check("symplectic_defect", rep.max_defect <= cfg.tolerances.defect_ceiling,
            "max relative defect " + fmt(rep.max_defect));
  const double eps = cfg.run.eps;
  double worst = 0.0;
  std::vector<double> log_t, mi, times;
  for (const auto& s : series.samples()) {
    CsvRow row;
    row.t = s.t;
    row.source = "classical";
    row.s_vn_a = row.s2_a = row.s_as_a = kNaN;
    row.lambda_alg = row.lambda_vol = row.bound_lower = row.bound_upper = kNaN;
    if (!s.dense) {
      row.i_ab = kNaN;
      row.trusted = false;
    } else {
      row.i_ab = classical_mi_from_flow(*s.dense, eps);
      const double closed = classical_counterexample_mi(s.t, eps);
      worst = std::max(worst, std::abs(row.i_ab - closed) / (1.0 + closed));
      if (s.t > 0.0) {
        times.push_back(s.t);
        log_t.push_back(std::log(s.t));
        mi.push_back(row.i_ab);
      }
    }
    rep.rows.push_back(row);
  }
  rec.check("classical_closed_form", worst <= 1e-9, "max relative gap to 1/2 ln(1 + t^2 eps^2) is " + fmt(worst));
  const auto idx = window_indices(times, 1e2 / eps, std::min(1e4 / eps, cfg.run.horizon));
  rep.log_fit = fit_window(log_t, mi, idx);
  if (!rep.log_fit) {
    rec.check("classical_log_slope", false, "fewer than 3 samples in t in [1e2, 1e4] / eps; raise horizon or samples");
  } else {
    rec.check("classical_log_slope", std::abs(rep.log_fit->slope - 1.0) <= 0.02,
              "slope of MI against ln t is " + fmt(rep.log_fit->slope));
  }
}

struct InitialState {
  std::optional<FockState> fock;
  CovarianceMatrix g0;  // reordered frame
};

InitialState initial_state(const ScenarioConfig& cfg, int n, const Matrix& p) {
  if (cfg.state.kind == StateKind::Gaussian) {
    if (cfg.state.covariance.size() == 0) return {std::nullopt, CovarianceMatrix::vacuum(n)};
    if (cfg.state.covariance.rows() != 2 * n || cfg.state.covariance.cols() != 2 * n) {
      throw Error(ErrorCode::ConfigError, "state.covariance dimension must be twice the mode count");
    }
    const Matrix g = p * cfg.state.covariance * p.transpose();
    return {std::nullopt, CovarianceMatrix(Matrix(0.5 * (g + g.transpose())))};
  }
  FockState psi = fock_state_from_spec(cfg.state, n);
  const GaussianState moments = covariance_of(psi, cfg.oracle.leak_ceiling);
  const Matrix g = p * moments.cov.matrix() * p.transpose();
  return {std::move(psi), CovarianceMatrix(Matrix(0.5 * (g + g.transpose())))};
}

void run_oracle(const ScenarioConfig& cfg, const QuadraticHamiltonian& original, const QuadraticHamiltonian& reordered,
                const InitialState& init, const Matrix& p, const ModeCount& split, double reference, RunReport& rep,
                Recorder& rec) {
  const int n = original.modes();
  const double horizon = cfg.oracle.horizon > 0.0 ? cfg.oracle.horizon : cfg.run.horizon;
  FockConfig fc;
  fc.n_modes = n;
  fc.cutoff = cfg.state.cutoff;
  fc.dt = cfg.oracle.dt;
  fc.leak_ceiling = cfg.oracle.leak_ceiling;
  fc.max_dimension = cfg.oracle.max_dimension;
  const auto traj = evolve_fock(*init.fock, original, horizon, fc, cfg.oracle.samples);

  // Gaussian flow sampled on the oracle's grid for the bounds and the Gaussian comparison.
  const int per_sample = static_cast<int>(std::ceil(horizon / cfg.oracle.samples / cfg.run.dt - 1e-9));
  PropagationOptions opts;
  opts.samples = cfg.oracle.samples;
  opts.defect_ceiling = cfg.tolerances.defect_ceiling;
  const auto series = propagate(reordered, horizon, horizon / (cfg.oracle.samples * std::max(per_sample, 1)), opts);

  std::vector<int> complement;
  for (int m = 0; m < n; ++m) {
    if (std::find(cfg.subsystem.begin(), cfg.subsystem.end(), m) == cfg.subsystem.end()) complement.push_back(m);
  }
  const auto sub_a = SubsystemSpec::first(split);
  double max_bracket_violation = 0.0;
  double max_gauss_gap = 0.0;
  const bool gaussian_start = cfg.state.fock_name == "vacuum" || cfg.state.fock_name == "coherent";
  const size_t count = std::min(traj.samples.size(), series.samples().size());
  for (size_t k = 0; k < count; ++k) {
    const auto& fs = traj.samples[k];
    const auto& gs = series.samples()[k];
    CsvRow row;
    row.t = fs.t;
    row.source = "fock";
    row.trusted = fs.trusted;
    row.s_vn_a = reduced_entropy(fs.state, cfg.subsystem);
    row.lambda_alg = rep.algebraic ? rep.algebraic->lambda_a : kNaN;
    row.lambda_vol = rep.volumetric ? rep.volumetric->lambda_a : kNaN;
    if (fs.trusted) {
      const GaussianState moments = covariance_of(fs.state, std::max(fs.leak, cfg.oracle.leak_ceiling));
      const Matrix g = p * moments.cov.matrix() * p.transpose();
      const CovarianceMatrix cov(Matrix(0.5 * (g + g.transpose())));
      const CovarianceMatrix ga = restrict(cov, sub_a);
      row.s2_a = renyi2_entropy(ga);
      row.s_as_a = asymptotic_entropy(ga.spd());
      row.i_ab = row.s_vn_a + reduced_entropy(fs.state, complement);
    } else {
      row.s2_a = row.s_as_a = row.i_ab = kNaN;
    }
    row.bound_lower = row.bound_upper = kNaN;
    if (cfg.run.bounds) {
      const auto b = squashed_bounds(gs.stretch.svd(), init.g0, split);
      row.bound_lower = b.lower;
      row.bound_upper = b.upper;
      if (fs.trusted) {
        max_bracket_violation = std::max({max_bracket_violation, b.lower - row.s_vn_a, row.s_vn_a - b.upper});
      }
    }
    if (gaussian_start && fs.trusted) {
      max_gauss_gap = std::max(max_gauss_gap, std::abs(row.s_vn_a - restricted_entropies(gs.stretch, init.g0, sub_a).s_vn));
    }
    rep.rows.push_back(row);
  }
  if (traj.leak_time) {
    rec.warn("oracle", "TruncationLeak", "top-level population exceeded " + fmt(cfg.oracle.leak_ceiling) + " at t = " +
                                             fmt(*traj.leak_time) + "; later samples are untrusted");
  }
  if (cfg.run.bounds) {
    rec.check("oracle_bounds_bracket", max_bracket_violation <= 1e-9,
              "max excursion of the oracle entropy outside the squashed bounds " + fmt(max_bracket_violation));
  }
  if (gaussian_start) {
    rec.check("oracle_gaussian_consistency", max_gauss_gap <= 1e-4,
              "max |S_fock - S_gaussian| over trusted samples " + fmt(max_gauss_gap));
  }
  GrowthOptions go;
  go.window_start = cfg.run.window_start;
  go.relative_tolerance = cfg.tolerances.oracle_rel;
  try {
    rep.oracle = verify_linear_growth(traj, cfg.subsystem, reference, go);
  } catch (const Error& e) {
    rec.warn("oracle", e);
    rec.check("oracle_slope", false, e.what());
    return;
  }
  rec.check("oracle_gaussian_bound", rep.oracle->gaussian_bound_respected,
            "max excess over the Gaussian entropy with equal moments " + fmt(rep.oracle->max_bound_excess));
  if (std::abs(reference) > kGrowthFloor) {
    rec.check("oracle_slope", rep.oracle->within_tolerance,
              "slope " + fmt(rep.oracle->fit.slope) + " vs Lambda_A " + fmt(reference) + " over [" +
                  fmt(rep.oracle->window_begin) + ", " + fmt(rep.oracle->window_end) + "], relative error " +
                  fmt(rep.oracle->relative_error));
  }
}

}  // namespace

EntropyReport restricted_entropies(const StretchFactor& m, const CovarianceMatrix& g0, const SubsystemSpec& sub) {
  const ScaledFactor f = m.gram_factor(sub.selector(), g0.spd().cholesky());
  EntropyReport out;
  out.modes = f.modes();
  out.s_r2 = 0.5 * f.log_det();
  for (double log_nu : f.log_symplectic_spectrum()) out.s_vn += mode_entropy_from_log(log_nu);
  out.s_as = out.s_r2 + out.modes * kLnHalfE;
  return out;
}

FockState fock_state_from_spec(const StateSpec& spec, int n_modes) {
  const int d = spec.cutoff;
  if (d < 4) throw Error(ErrorCode::ConfigError, "state.cutoff must be at least 4");
  try {
    if (spec.fock_name == "vacuum") return FockState::vacuum(n_modes, d);
    if (spec.fock_name == "basis") {
      if (static_cast<int>(spec.occupations.size()) != n_modes) {
        throw Error(ErrorCode::ConfigError, "state.occupations needs one entry per mode");
      }
      return FockState::basis(d, spec.occupations);
    }
    if (spec.fock_name == "coherent") {
      if (static_cast<int>(spec.alpha.size()) != 2 * n_modes) {
        throw Error(ErrorCode::ConfigError, "state.alpha needs a (re, im) pair per mode");
      }
      std::vector<Complex> alphas;
      for (int m = 0; m < n_modes; ++m) alphas.emplace_back(spec.alpha[2 * m], spec.alpha[2 * m + 1]);
      return FockState::coherent(d, alphas);
    }
    if (spec.fock_name == "cat") {
      if (spec.alpha.size() != 2) throw Error(ErrorCode::ConfigError, "state.alpha must be one (re, im) pair for a cat");
      return FockState::cat(n_modes, d, spec.cat_mode, Complex(spec.alpha[0], spec.alpha[1]));
    }
    if (spec.fock_name == "superposition") {
      std::vector<std::pair<std::vector<int>, Complex>> terms;
      for (const auto& t : spec.terms) {
        if (static_cast<int>(t.occupations.size()) != n_modes) {
          throw Error(ErrorCode::ConfigError, "state.terms occupations need one entry per mode");
        }
        terms.emplace_back(t.occupations, Complex(t.re, t.im));
      }
      return FockState::superposition(d, terms);
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    throw Error(ErrorCode::ConfigError, std::string("state: ") + e.what());
  }
  throw Error(ErrorCode::ConfigError, "unknown Fock state '" + spec.fock_name + "'");
}

bool RunReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

RunReport run_scenario(const ScenarioConfig& cfg, const RunStages& stages) {
  RunReport rep;
  Recorder rec(rep);
  rep.scenario = cfg.name;
  rep.config_hash = config_hash(cfg);
  rep.horizon = cfg.run.horizon;
  rep.subsystem = cfg.subsystem;

  const QuadraticHamiltonian original = hamiltonian_from_spec(cfg.hamiltonian);
  const int n = original.modes();
  rep.modes = n;
  if (cfg.run.analysis == "classical_mi") {
    run_classical(cfg, original, rep, rec);
    return rep;
  }
  std::set<int> seen;
  for (int m : cfg.subsystem) {
    if (m < 0 || m >= n || !seen.insert(m).second) {
      throw Error(ErrorCode::ConfigError, "subsystem: mode indices must be distinct and below " + std::to_string(n));
    }
  }
  const int n_a = static_cast<int>(cfg.subsystem.size());
  if (n_a >= n) throw Error(ErrorCode::ConfigError, "subsystem must leave at least one mode in the complement");

  const Matrix p = mode_permutation(n, cfg.subsystem);
  const QuadraticHamiltonian ham = permuted(original, p);
  const ModeCount split(n, n_a);
  const auto sub_a = SubsystemSpec::first(split);
  const auto sub_b = SubsystemSpec::second(split);
  const InitialState init = initial_state(cfg, n, p);
  const double s_total = von_neumann_entropy(init.g0);
  const bool pure = is_pure(init.g0);

  PropagationOptions popts;
  popts.samples = cfg.run.samples;
  popts.defect_ceiling = cfg.tolerances.defect_ceiling;
  std::optional<PropagationResult> series;
  try {
    series = propagate(ham, cfg.run.horizon, cfg.run.dt, popts);
  } catch (const Error& e) {
    rec.warn("propagate", e);
    rec.check("symplectic_defect", false, e.what());
    return rep;
  }
  rep.max_defect = std::max(series->max_defect(), series->max_step_defect());
  rec.check("symplectic_defect", rep.max_defect <= cfg.tolerances.defect_ceiling,
            "max relative defect " + fmt(rep.max_defect) + " (ceiling " + fmt(cfg.tolerances.defect_ceiling) + ")");

  LyapunovOptions lopts;
  lopts.threshold_factor = cfg.tolerances.lyapunov_threshold;
  lopts.require_convergence = false;
  try {
    rep.lyapunov = lyapunov_from_propagation(*series, lopts);
    if (!rep.lyapunov->converged) {
      rec.warn("lyapunov", "NotConverged",
               "halving residual " + fmt(rep.lyapunov->residual) + " exceeds " + fmt(rep.lyapunov->threshold) +
                   " at t* = " + fmt(rep.lyapunov->horizon) + "; raise run.horizon");
    }
    rep.regularity = regularity_check(*rep.lyapunov, std::max(2.0 * rep.lyapunov->residual, 1e-9));
    rec.check("lyapunov_pairing", rep.regularity->regular,
              "max |lambda_k + lambda_{2N+1-k}| = " + fmt(rep.regularity->max_violation));
  } catch (const Error& e) {
    rec.warn("lyapunov", e);
  }

  if (ham.period() && !ham.is_constant()) {
    try {
      const double tau = *ham.period();
      PropagationOptions one;
      one.samples = 1;
      const auto period_run = propagate(ham, tau, std::min(cfg.run.dt, tau / 50.0), one);
      const Matrix k = stroboscopic_generator(*period_run.back().dense, tau);
      Eigen::EigenSolver<Matrix> es(k, false);
      for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) rep.floquet_exponents.push_back(es.eigenvalues()(i).real());
      std::sort(rep.floquet_exponents.rbegin(), rep.floquet_exponents.rend());
      double sum = 0.0;
      for (int i = 0; i < 2 * n_a; ++i) sum += rep.floquet_exponents[static_cast<size_t>(i)];
      rep.floquet_lambda = sum;
    } catch (const Error& e) {
      rec.warn("floquet", e);
    }
  }

  if (!stages.exponents) return rep;
  if (rep.lyapunov) {
    try {
      rep.algebraic = subsystem_exponent_algebraic(sub_a, *rep.lyapunov);
    } catch (const Error& e) {
      rec.warn("exponent.algebraic", e);
    }
  }
  try {
    rep.volumetric = subsystem_exponent_volumetric(sub_a, *series, init.g0, cfg.run.window_start);
  } catch (const Error& e) {
    rec.warn("exponent.volumetric", e);
  }
  const double horizon = series->back().t;
  const double zero_band = 3.0 * std::log(std::max(horizon, 2.0)) / horizon;
  if (cfg.run.log_growth) {
    if (rep.algebraic && rep.volumetric) {
      rec.check("lambda_zero", std::abs(rep.algebraic->lambda_a) <= zero_band && std::abs(rep.volumetric->lambda_a) <= zero_band,
                "algebraic " + fmt(rep.algebraic->lambda_a) + ", volumetric " + fmt(rep.volumetric->lambda_a) +
                    ", finite-horizon band 3 ln t*/t* = " + fmt(zero_band));
    }
  } else if (rep.algebraic && rep.volumetric) {
    const double alg = rep.algebraic->lambda_a;
    const double vol = rep.volumetric->lambda_a;
    if (std::max(std::abs(alg), std::abs(vol)) > kGrowthFloor) {
      rec.check("exponent_agreement", relative_match(vol, alg, cfg.tolerances.exponent_rel),
                "algebraic " + fmt(alg) + " vs volumetric " + fmt(vol));
    }
  }
  if (rep.floquet_lambda && rep.volumetric && std::abs(*rep.floquet_lambda) > kGrowthFloor) {
    rec.check("floquet_agreement", relative_match(rep.volumetric->lambda_a, *rep.floquet_lambda, cfg.tolerances.exponent_rel),
              "stroboscopic " + fmt(*rep.floquet_lambda) + " vs volumetric " + fmt(rep.volumetric->lambda_a));
  }

  if (!stages.entropies) return rep;
  const double lambda_alg = rep.algebraic ? rep.algebraic->lambda_a : kNaN;
  const double lambda_vol = rep.volumetric ? rep.volumetric->lambda_a : kNaN;
  const bool do_bounds = stages.bounds && cfg.run.bounds;
  int corridor_violations = 0;
  bool entropy_failed = false;
  double max_bracket_violation = 0.0;
  bool bounds_ok = do_bounds;
  std::vector<double> times, s_vn, s2, lower, upper;
  for (const auto& s : series->samples()) {
    CsvRow row;
    row.t = s.t;
    row.lambda_alg = lambda_alg;
    row.lambda_vol = lambda_vol;
    row.bound_lower = row.bound_upper = kNaN;
    try {
      const EntropyReport a = restricted_entropies(s.stretch, init.g0, sub_a);
      const EntropyReport b = restricted_entropies(s.stretch, init.g0, sub_b);
      row.s_vn_a = a.s_vn;
      row.s2_a = a.s_r2;
      row.s_as_a = a.s_as;
      row.i_ab = a.s_vn + b.s_vn - s_total;
      const double slack = cfg.tolerances.corridor_slack * (1.0 + std::abs(a.s_as));
      if (a.s_r2 > a.s_vn + slack || a.s_vn > a.s_as + slack) ++corridor_violations;
    } catch (const Error& e) {
      if (!entropy_failed) rec.warn("entropy", e);
      entropy_failed = true;
      row.s_vn_a = row.s2_a = row.s_as_a = row.i_ab = kNaN;
      row.trusted = false;
    }
    if (bounds_ok) {
      try {
        const auto bnd = squashed_bounds(s.stretch.svd(), init.g0, split);
        row.bound_lower = bnd.lower;
        row.bound_upper = bnd.upper;
        if (pure && std::isfinite(row.s_vn_a)) {
          max_bracket_violation = std::max({max_bracket_violation, bnd.lower - row.s_vn_a, row.s_vn_a - bnd.upper});
        }
      } catch (const Error& e) {
        rec.warn("bounds", e);
        bounds_ok = false;
      }
    }
    times.push_back(s.t);
    s_vn.push_back(row.s_vn_a);
    s2.push_back(row.s2_a);
    lower.push_back(row.bound_lower);
    upper.push_back(row.bound_upper);
    rep.rows.push_back(row);
  }
  rec.check("entropy_corridor", corridor_violations == 0,
            std::to_string(corridor_violations) + " samples outside S2 <= S <= S2 + N_A ln(e/2)");

  const auto window = window_indices(times, cfg.run.window_start * horizon, horizon);
  rep.entropy_fit = fit_window(times, s_vn, window);
  const std::optional<double> reference =
      rep.algebraic ? std::optional<double>(rep.algebraic->lambda_a) : rep.floquet_lambda;
  if (cfg.run.log_growth) {
    std::vector<double> log_t, s2_log;
    std::vector<size_t> idx;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (size_t i = 0; i < times.size(); ++i) {
      if (times[i] >= 10.0 && std::isfinite(s2[i])) {
        idx.push_back(log_t.size());
        log_t.push_back(std::log(times[i]));
        s2_log.push_back(s2[i]);
        lo = std::min(lo, s2[i] - std::log(times[i]));
        hi = std::max(hi, s2[i] - std::log(times[i]));
      }
    }
    rep.log_fit = fit_window(log_t, s2_log, idx);
    if (rep.log_fit) {
      rec.check("log_growth", std::abs(rep.log_fit->slope - 1.0) <= 0.1 && hi - lo < 0.5,
                "slope of S2(A) against ln t is " + fmt(rep.log_fit->slope) + ", spread of S2(A) - ln t is " +
                    fmt(hi - lo));
    } else {
      rec.check("log_growth", false, "fewer than 3 samples with t >= 10");
    }
  } else if (reference && std::abs(*reference) > kGrowthFloor) {
    if (rep.entropy_fit) {
      rec.check("entropy_slope", relative_match(rep.entropy_fit->slope, *reference, cfg.tolerances.slope_rel),
                "S_vn(A) slope " + fmt(rep.entropy_fit->slope) + " vs Lambda_A " + fmt(*reference));
    } else {
      rec.check("entropy_slope", false, "fewer than 3 samples in the fit window");
    }
  }

  if (do_bounds && bounds_ok) {
    if (pure) {
      rec.check("bounds_bracket", max_bracket_violation <= 1e-9,
                "max excursion of S_vn(A) outside the squashed bounds " + fmt(max_bracket_violation));
    }
    rep.lower_fit = fit_window(times, lower, window);
    rep.upper_fit = fit_window(times, upper, window);
    if (!cfg.run.log_growth && reference && std::abs(*reference) > kGrowthFloor && rep.lower_fit && rep.upper_fit) {
      rec.check("bound_slopes",
                relative_match(rep.lower_fit->slope, *reference, cfg.tolerances.slope_rel) &&
                    relative_match(rep.upper_fit->slope, *reference, cfg.tolerances.slope_rel),
                "lower " + fmt(rep.lower_fit->slope) + ", upper " + fmt(rep.upper_fit->slope) + " vs Lambda_A " +
                    fmt(*reference));
    }
  }

  if (stages.bounds && !cfg.run.gss_times.empty()) {
    double worst = -std::numeric_limits<double>::infinity();
    for (double t : cfg.run.gss_times) {
      try {
        PropagationOptions one;
        one.samples = 1;
        one.defect_ceiling = cfg.tolerances.defect_ceiling;
        const auto run = propagate(ham, t, std::min(cfg.run.dt, t), one);
        if (!run.back().dense) {
          rec.warn("gss", "SingularM", "dense M(" + fmt(t) + ") overflowed; GSS minimization skipped");
          continue;
        }
        const auto b = gss_rhs_minimize(*run.back().dense, split);
        rep.gss.push_back({t, b.value, b.status, b.start, b.iterations});
        worst = std::max(worst, b.value);
      } catch (const Error& e) {
        rec.warn("gss", e);
      }
    }
    if (cfg.run.log_growth && !rep.gss.empty()) {
      const double ceiling = n * kLnHalfE + 1e-6;
      rec.check("gss_rhs_bounded", worst <= ceiling,
                "max minimized GSS right-hand side " + fmt(worst) + " (ceiling " + fmt(ceiling) + ")");
    }
  }

  if (init.fock && (cfg.oracle.enabled || stages.force_oracle)) {
    try {
      run_oracle(cfg, original, ham, init, p, split, reference.value_or(kNaN), rep, rec);
    } catch (const Error& e) {
      rec.warn("oracle", e);
      rec.check("oracle_run", false, e.what());
    }
  } else if (stages.force_oracle) {
    rec.warn("oracle", "ConfigError", "the oracle needs a Fock initial state (state.kind = fock)");
  }
  return rep;
}

}  // namespace quadent
