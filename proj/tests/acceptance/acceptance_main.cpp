// One PASS/FAIL line per acceptance criterion. Exit status is non-zero when a
// criterion fails unexpectedly; criterion 2 is a documented known failure.

#include <quadent/dynamics.hpp>
#include <quadent/entropy.hpp>
#include <quadent/fit.hpp>
#include <quadent/lyapunov.hpp>
#include <quadent/pipeline.hpp>
#include <quadent/scenarios.hpp>
#include <quadent/ssa_bounds.hpp>
#include <quadent/subsystem_exponent.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "generators.hpp"

namespace {

using namespace quadent;
using quadent::testing::Rng;

// Tolerances and budgets, one block per criterion.
constexpr double kGaussianSlopeRel = 0.02;
constexpr double kGaussianRuntime = 10.0;
constexpr double kFockSlopeRel = 0.10;
constexpr int kFockCutoff = 20;
constexpr double kFockRuntime = 300.0;
constexpr int kCorridorSamples = 1000;
constexpr double kCorridorSlack = 1e-9;
constexpr double kCorridorRuntime = 5.0;
constexpr int kGramSamples = 100;
constexpr double kGramTol = 1e-9;
constexpr double kExponentRel = 0.02;
constexpr int kRotatedTrials = 100;
constexpr int kRotatedRequired = 99;
constexpr int kPolarHamiltonians = 20;
constexpr int kStationaryTrials = 20;
constexpr double kStationaryResidual = 1e-10;
constexpr double kStationaryValueTol = 1e-6;
constexpr double kLogDeviation = 0.5;
constexpr double kRhsSlack = 1e-6;
constexpr double kClassicalSlopeTol = 0.02;
constexpr double kBoundSlopeRel = 0.05;
constexpr double kBracketSlack = 1e-9;
constexpr double kDefectCeiling = 1e-8;
constexpr double kOrderLow = 1.8;
constexpr double kOrderHigh = 2.2;

// Unattainable at the pinned cutoff; see the README section on the Fock oracle.
const std::set<int> kKnownFailures{2};

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Largest relative symplectic defect seen by any run in the suite.
double g_max_defect = 0.0;

void note_defect(double d) { g_max_defect = std::max(g_max_defect, d); }

RunReport run_tracked(const ScenarioConfig& cfg) {
  RunReport r = run_scenario(cfg);
  note_defect(r.max_defect);
  return r;
}

const CheckResult* find_check(const RunReport& r, const std::string& name) {
  for (const auto& c : r.checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

// Fock starts shared by criteria 2 and 9.
struct FockRun {
  std::string label;
  RunReport report;
};

std::vector<FockRun> fock_runs() {
  std::vector<FockRun> runs;
  auto base = builtin_scenario("two_mode_squeezer");
  base.state.cutoff = kFockCutoff;
  base.oracle.enabled = true;

  auto vacuum = base;
  vacuum.state.fock_name = "vacuum";
  runs.push_back({"|0,0>", run_tracked(vacuum)});

  auto one = base;
  one.state.fock_name = "basis";
  one.state.occupations = {1, 0};
  runs.push_back({"|1,0>", run_tracked(one)});

  auto sup = base;
  sup.state.fock_name = "superposition";
  sup.state.terms = {{{0, 0}, std::numbers::sqrt2 / 2.0, 0.0}, {{2, 0}, std::numbers::sqrt2 / 2.0, 0.0}};
  runs.push_back({"(|0,0>+|2,0>)/sqrt2", run_tracked(sup)});
  return runs;
}

Outcome gaussian_linear_growth() {
  const auto t0 = std::chrono::steady_clock::now();
  const RunReport r = run_tracked(builtin_scenario("inverted_pair"));
  const double elapsed = seconds_since(t0);
  if (!r.entropy_fit || !r.algebraic) return {false, "pipeline produced no slope or exponent"};
  const double err = rel(r.entropy_fit->slope, r.algebraic->lambda_a);
  return {err <= kGaussianSlopeRel && elapsed < kGaussianRuntime,
          fmt("slope %.6f vs Lambda_A %.6f (rel %.2e, tol %.2f), %.2fs (limit %.0fs)", r.entropy_fit->slope,
              r.algebraic->lambda_a, err, kGaussianSlopeRel, elapsed, kGaussianRuntime)};
}

Outcome fock_linear_growth(const std::vector<FockRun>& runs, double elapsed) {
  std::vector<double> slopes;
  std::string detail;
  double lambda = 0.0;
  for (const auto& run : runs) {
    if (!run.report.oracle || !run.report.algebraic) return {false, run.label + ": oracle produced no slope"};
    lambda = run.report.algebraic->lambda_a;
    slopes.push_back(run.report.oracle->fit.slope);
    detail += fmt("%s %.4f, ", run.label.c_str(), run.report.oracle->fit.slope);
  }
  double worst = 0.0;
  for (size_t i = 0; i < slopes.size(); ++i) {
    worst = std::max(worst, rel(slopes[i], lambda));
    for (size_t j = i + 1; j < slopes.size(); ++j) worst = std::max(worst, std::abs(slopes[i] - slopes[j]) / lambda);
  }
  return {worst <= kFockSlopeRel && elapsed < kFockRuntime,
          detail + fmt("Lambda_A %.4f; worst relative gap %.3f (tol %.2f) at d=%d, %.1fs", lambda, worst, kFockSlopeRel,
                       kFockCutoff, elapsed)};
}

Outcome corridor() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(1001);
  int violations = 0;
  double tightest = 1e300;
  for (int k = 0; k < kCorridorSamples; ++k) {
    const int modes = 1 + k % 4;
    const bool pure = k % 5 == 0;
    const double nu_max = k % 3 == 0 ? 40.0 : 4.0;
    const CovarianceMatrix g(quadent::testing::random_covariance(modes, rng, pure, nu_max));
    const double gap = von_neumann_entropy(g) - renyi2_entropy(g);
    const double ceiling = modes * kLnHalfE;
    if (gap < -kCorridorSlack || gap > ceiling + kCorridorSlack) ++violations;
    tightest = std::min({tightest, gap, ceiling - gap});
  }
  const double elapsed = seconds_since(t0);
  return {violations == 0 && elapsed < kCorridorRuntime,
          fmt("%d violations in %d states (1-4 modes), min margin to either edge %.2e, %.2fs", violations, kCorridorSamples, tightest,
              elapsed)};
}

Outcome geometric_renyi() {
  Rng rng(1002);
  double worst = 0.0;
  for (int k = 0; k < kGramSamples; ++k) {
    const int modes = 1 + k % 3;
    const Matrix g = quadent::testing::random_covariance(modes, rng, false);
    // Rows of a symplectic matrix: a unit-volume Darboux parallelepiped.
    const Matrix edges = quadent::testing::random_symplectic(modes, rng, 0.7);
    const Matrix gram = edges * g * edges.transpose();
    const double log_volume = 0.5 * std::log(gram.determinant());
    worst = std::max(worst, std::abs(renyi2_entropy(CovarianceMatrix(g)) - log_volume));
  }
  return {worst <= kGramTol, fmt("max |S2 - log Gram volume| = %.2e over %d pairs (tol %.0e)", worst, kGramSamples, kGramTol)};
}

Outcome subsystem_exponents() {
  std::string detail;
  bool ok = true;
  for (const char* name : {"inverted_pair", "coupled_chain", "parametric_drive", "two_mode_squeezer"}) {
    const RunReport r = run_tracked(builtin_scenario(name));
    if (!r.algebraic || !r.volumetric) {
      ok = false;
      detail += fmt("%s: missing exponent; ", name);
      continue;
    }
    const double err = rel(r.volumetric->lambda_a, r.algebraic->lambda_a);
    ok = ok && err <= kExponentRel;
    detail += fmt("%s %.4f/%.4f; ", name, r.algebraic->lambda_a, r.volumetric->lambda_a);
  }
  const auto cfg = builtin_scenario("inverted_pair");
  const auto series = propagate(hamiltonian_from_spec(cfg.hamiltonian), cfg.run.horizon, cfg.run.dt, {.samples = 20});
  note_defect(series.max_defect());
  const LyapunovData lyap = lyapunov_from_propagation(series);
  Rng rng(1005);
  int agree = 0;
  for (int k = 0; k < kRotatedTrials; ++k) {
    const Matrix rows = quadent::testing::random_symplectic(2, rng, 0.8).topRows(2);
    const ExponentReport rep = subsystem_exponent_algebraic(SubsystemSpec::from_selector(rows, 1e-10), lyap);
    if (rep.generic_agrees) ++agree;
  }
  ok = ok && agree >= kRotatedRequired;
  return {ok, detail + fmt("generic shortcut agrees on %d/%d rotated subsystems (need %d); tol %.2f", agree,
                           kRotatedTrials, kRotatedRequired, kExponentRel)};
}

Outcome polar_spectra() {
  // Horizon with lambda_max t = 6 keeps M dense enough for an explicit polar
  // decomposition, so lambda(T) does not reuse the log-SVD behind lambda(M).
  Rng rng(1006);
  LyapunovOptions opts;
  opts.require_convergence = false;
  int tested = 0;
  int consistent = 0;
  double worst_ratio = 0.0;
  for (int trial = 0; trial < 200 && tested < kPolarHamiltonians; ++trial) {
    const auto ham = QuadraticHamiltonian::constant(quadent::testing::random_symmetric(4, rng));
    Eigen::EigenSolver<Matrix> es(generator(ham, 0.0), false);
    double top = -1e300;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) top = std::max(top, es.eigenvalues()(i).real());
    if (top < 0.05) continue;
    ++tested;
    const double horizon = 6.0 / top;
    const auto series = propagate(ham, horizon, horizon / 2000.0, {.samples = 20});
    note_defect(series.max_defect());
    const PolarSpectra p = polar_factor_exponents(series, opts);
    const double ratio = std::max(p.deviation_t, p.deviation_sqrt_t) / p.residual;
    worst_ratio = std::max(worst_ratio, ratio);
    if (p.dense_route && p.deviation_t <= p.residual && p.deviation_sqrt_t <= p.residual) ++consistent;
  }
  return {tested == kPolarHamiltonians && consistent == tested,
          fmt("%d/%d unstable Hamiltonians agree through a dense polar decomposition; worst deviation/residual %.2e",
              consistent, tested, worst_ratio)};
}

Outcome stationarity() {
  Rng rng(1007);
  const ModeCount split(2, 1);
  double worst_residual = 0.0;
  double worst_value = 0.0;
  for (int k = 0; k < kStationaryTrials; ++k) {
    const Matrix m = quadent::testing::random_pd_symplectic(2, rng, 0.7);
    const auto family = SubsystemFamily::mutual_information_pair(m, split);
    worst_residual = std::max(worst_residual, stationarity_residual(SpdMatrix(Matrix(m.inverse())), family));
    const double target = 2.0 * mutual_information_asymptotic(SpdMatrix(m), split);
    worst_value = std::max(worst_value, std::abs(gss_rhs_minimize(m, split).value - target));
  }
  return {worst_residual <= kStationaryResidual && worst_value <= kStationaryValueTol,
          fmt("max residual at M^-1 %.2e (tol %.0e), max |min - 2 I_as(M)| %.2e (tol %.0e) over %d matrices",
              worst_residual, kStationaryResidual, worst_value, kStationaryValueTol, kStationaryTrials)};
}

Outcome counterexamples() {
  std::vector<double> times;
  for (int k = 0; k <= 40; ++k) times.push_back(std::pow(10.0, 1.0 + 2.0 * k / 40.0));
  const MetastableDemo log_demo = metastable_demo(times);
  const MetastableDemo rhs_demo = metastable_demo({1.0, 10.0, 100.0, 1000.0});
  const double rhs_ceiling = rhs_demo.rhs_ceiling + kRhsSlack;

  const ScenarioConfig classical = builtin_scenario("classical_counterexample");
  const RunReport r = run_tracked(classical);
  std::vector<double> x, y;
  for (const auto& row : r.rows) {
    if (row.t * classical.run.eps >= 1e2 && row.t * classical.run.eps <= 1e4 && std::isfinite(row.i_ab)) {
      x.push_back(std::log(row.t));
      y.push_back(row.i_ab);
    }
  }
  const double slope = x.size() >= 2 ? fit_line(x, y).slope : std::nan("");
  const bool ok = log_demo.max_log_deviation < kLogDeviation && rhs_demo.max_rhs <= rhs_ceiling &&
                  std::abs(slope - 1.0) <= kClassicalSlopeTol;
  return {ok, fmt("max |S2(A) - ln t| on [10, 1e3] %.4f (tol %.1f); max GSS rhs %.2e (ceiling %.6f); classical MI "
                  "slope %.5f over %zu samples (tol %.2f)",
                  log_demo.max_log_deviation, kLogDeviation, rhs_demo.max_rhs, rhs_ceiling, slope, x.size(),
                  kClassicalSlopeTol)};
}

Outcome squashed_bounds(const std::vector<FockRun>& runs) {
  bool ok = true;
  std::string detail;
  for (const auto& run : runs) {
    const RunReport& r = run.report;
    const CheckResult* bracket = find_check(r, "oracle_bounds_bracket");
    if (!bracket || !r.lower_fit || !r.upper_fit || !r.algebraic) {
      ok = false;
      detail += run.label + ": missing bounds; ";
      continue;
    }
    double excursion = 0.0;
    for (const auto& row : r.rows) {
      if (row.source != "fock" || !row.trusted) continue;
      excursion = std::max({excursion, row.bound_lower - row.s_vn_a, row.s_vn_a - row.bound_upper});
    }
    const double lambda = r.algebraic->lambda_a;
    const double lo = rel(r.lower_fit->slope, lambda);
    const double hi = rel(r.upper_fit->slope, lambda);
    ok = ok && excursion <= kBracketSlack && lo <= kBoundSlopeRel && hi <= kBoundSlopeRel;
    detail += fmt("%s excursion %.1e, slopes %.4f/%.4f; ", run.label.c_str(), excursion, r.lower_fit->slope,
                  r.upper_fit->slope);
  }
  return {ok, detail + fmt("Lambda_A %.4f, slope tol %.2f", runs.front().report.algebraic->lambda_a, kBoundSlopeRel)};
}

Outcome mechanics() {
  // Driven oscillator pair over five periods; error against a 64x finer step.
  const QuadraticHamiltonian h = hamiltonian_from_spec(builtin_scenario("parametric_drive").hamiltonian);
  const double period = *h.period();
  const double horizon = 5.0 * period;
  const Matrix reference = *propagate(h, horizon, period / 6400.0, {.samples = 1}).back().dense;
  std::vector<double> errors;
  for (int n : {100, 200, 400}) {
    const auto run = propagate(h, horizon, period / n, {.samples = 1});
    note_defect(run.max_defect());
    errors.push_back(max_abs(*run.back().dense - reference) / max_abs(reference));
  }
  const double order1 = std::log2(errors[0] / errors[1]);
  const double order2 = std::log2(errors[1] / errors[2]);
  const bool ok = g_max_defect <= kDefectCeiling && order1 >= kOrderLow && order1 <= kOrderHigh && order2 >= kOrderLow &&
                  order2 <= kOrderHigh;
  return {ok, fmt("max relative defect over the suite %.2e (ceiling %.0e); observed orders %.3f, %.3f (want %.1f-%.1f)",
                  g_max_defect, kDefectCeiling, order1, order2, kOrderLow, kOrderHigh)};
}

}  // namespace

int main() {
  struct Row {
    int id;
    const char* title;
    std::function<Outcome()> run;
  };
  std::vector<FockRun> fock;
  double fock_seconds = 0.0;
  auto ensure_fock = [&] {
    if (!fock.empty()) return;
    const auto t0 = std::chrono::steady_clock::now();
    fock = fock_runs();
    fock_seconds = seconds_since(t0);
  };
  const std::vector<Row> rows{
      {1, "linear growth, Gaussian", gaussian_linear_growth},
      {2, "linear growth, non-Gaussian",
       [&] {
         ensure_fock();
         return fock_linear_growth(fock, fock_seconds);
       }},
      {3, "bounding corridor", corridor},
      {4, "geometric Renyi-2", geometric_renyi},
      {5, "subsystem exponent", subsystem_exponents},
      {6, "polar-factor spectra", polar_spectra},
      {7, "stationarity", stationarity},
      {8, "metastable and classical counterexamples", counterexamples},
      {9, "squashed-entanglement bounds",
       [&] {
         ensure_fock();
         return squashed_bounds(fock);
       }},
      {10, "mechanics", mechanics},
  };

  int unexpected = 0;
  int passed = 0;
  for (const auto& row : rows) {
    Outcome o;
    try {
      o = row.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const bool known = kKnownFailures.count(row.id) > 0;
    if (o.passed) ++passed;
    if (!o.passed && !known) ++unexpected;
    std::printf("%s %2d %s: %s%s\n", o.passed ? "PASS" : "FAIL", row.id, row.title, o.detail.c_str(),
                !o.passed && known ? " [known failure]" : "");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed, %d unexpected failures\n", passed, rows.size(), unexpected);
  return unexpected == 0 ? 0 : 1;
}
