#include <gtest/gtest.h>

#include <quadent/subsystem_exponent.hpp>

#include <algorithm>
#include <cmath>

#include "generators.hpp"

using namespace quadent;
using quadent::testing::Rng;

namespace {

// Uncoupled single-mode squeezers: M = diag(e^{k1 t}, e^{-k1 t}, e^{k2 t}, e^{-k2 t}).
QuadraticHamiltonian squeezers(double k1, double k2) {
  Matrix h = Matrix::Zero(4, 4);
  h(0, 1) = h(1, 0) = k1;
  h(2, 3) = h(3, 2) = k2;
  return QuadraticHamiltonian::constant(h);
}

// Two inverted oscillators with a position coupling.
QuadraticHamiltonian coupled_inverted(double k1, double k2, double g) {
  Matrix h = Matrix::Zero(4, 4);
  h(0, 0) = -k1 * k1;
  h(1, 1) = 1.0;
  h(2, 2) = -k2 * k2;
  h(3, 3) = 1.0;
  h(0, 2) = h(2, 0) = g;
  return QuadraticHamiltonian::constant(h);
}

PropagationResult run(const QuadraticHamiltonian& h, double t, double dt, int samples = 40) {
  PropagationOptions opts;
  opts.samples = samples;
  return propagate(h, t, dt, opts);
}

Matrix symplectic_2x2(Rng& rng) { return quadent::testing::random_symplectic(1, rng, 0.6); }

}  // namespace

TEST(DarbouxRows, Examples) {
  const ModeCount split(2, 1);
  Matrix first = Matrix::Zero(2, 4);
  first(0, 0) = first(1, 1) = 1.0;
  EXPECT_EQ(darboux_rows(SubsystemSpec::first(split)), first);
  Matrix second = Matrix::Zero(2, 4);
  second(0, 2) = second(1, 3) = 1.0;
  EXPECT_EQ(darboux_rows(SubsystemSpec::second(split)), second);
  Rng rng(61);
  const Matrix u = quadent::testing::random_orthogonal_symplectic(2, rng);
  EXPECT_NO_THROW(darboux_rows(SubsystemSpec::from_selector(first * u)));
}

TEST(ExpansionMatrix, Examples) {
  Rng rng(62);
  LyapunovData lyap;
  lyap.basis = quadent::testing::random_orthogonal_symplectic(2, rng);
  lyap.exponents = {1.0, 0.5, -0.5, -1.0};
  const Matrix theta = lyap.basis.topRows(2);
  const Matrix f = expansion_matrix(theta, lyap);
  Matrix expected = Matrix::Zero(2, 4);
  expected(0, 0) = expected(1, 1) = 1.0;
  EXPECT_LE(max_abs(f - expected), 1e-12);

  const Matrix random_theta = quadent::testing::random_gaussian(2, 4, rng);
  const Matrix g = expansion_matrix(random_theta, lyap);
  for (int i = 0; i < 2; ++i) EXPECT_NEAR(g.row(i).norm(), random_theta.row(i).norm(), 1e-12);
  EXPECT_LE(max_abs(g * lyap.basis - random_theta), 1e-12);
  EXPECT_THROW(expansion_matrix(Matrix::Zero(2, 6), lyap), Error);
}

TEST(SelectColumns, Examples) {
  Matrix id = Matrix::Zero(2, 4);
  id(0, 0) = id(1, 1) = 1.0;
  EXPECT_EQ(select_columns(id).indices, (std::vector<int>{0, 1}));

  Matrix dup(2, 4);
  dup << 1, 1, 0, 3, 2, 2, 1, 0;
  EXPECT_EQ(select_columns(dup).indices, (std::vector<int>{0, 2}));

  Rng rng(63);
  for (int trial = 0; trial < 50; ++trial) {
    EXPECT_EQ(select_columns(quadent::testing::random_gaussian(4, 6, rng)).indices, (std::vector<int>{0, 1, 2, 3}));
  }
}

TEST(SelectColumns, RankDeficientReportsMargins) {
  Matrix f = Matrix::Zero(2, 4);
  f(0, 0) = f(0, 1) = 1.0;
  try {
    select_columns(f);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RankDeficient);
    EXPECT_NE(std::string(e.what()).find("margins"), std::string::npos);
  }
}

TEST(SelectColumns, ClusterSpansReplaceArbitraryVectors) {
  // Column 1 is inside a two-dimensional cluster; only the span matters.
  Matrix f(2, 4);
  f << 1, 1, 0, 0, 0, 1e-12, 1, 0;
  const std::vector<ExponentCluster> clusters{{0, 1}, {1, 2}, {3, 1}};
  EXPECT_EQ(select_columns(f, clusters, 1e-8).indices, (std::vector<int>{0, 1}));
  EXPECT_EQ(select_columns(f, 1e-8).indices, (std::vector<int>{0, 2}));
}

TEST(AlgebraicExponent, FullSystemIsZero) {
  const auto lyap = lyapunov_spectrum(coupled_inverted(1.0, 0.5, 0.3), 600.0, 0.05);
  const auto full = SubsystemSpec::modes(2, {0, 1});
  const auto rep = subsystem_exponent_algebraic(full, lyap);
  EXPECT_NEAR(rep.lambda_a, 0.0, 1e-8);
  EXPECT_EQ(rep.indices, (std::vector<int>{0, 1, 2, 3}));
}

TEST(AlgebraicExponent, GenericCouplingSumsLargestExponents) {
  const auto lyap = lyapunov_spectrum(coupled_inverted(1.0, 0.5, 0.3), 600.0, 0.05);
  for (const auto& sub : {SubsystemSpec::modes(2, {0}), SubsystemSpec::modes(2, {1})}) {
    const auto rep = subsystem_exponent_algebraic(sub, lyap);
    EXPECT_EQ(rep.indices, (std::vector<int>{0, 1}));
    EXPECT_NEAR(rep.lambda_a, lyap.exponents[0] + lyap.exponents[1], 1e-12);
    EXPECT_TRUE(rep.generic_agrees);
  }
}

TEST(AlgebraicExponent, SymplecticallyPairedLyapunovVectors) {
  // Mode 2 is spanned by the (+k2, -k2) pair, mode 1 by (+k1, -k1).
  const auto lyap = lyapunov_spectrum(squeezers(1.0, 0.4), 20.0, 0.01);
  const auto b = subsystem_exponent_algebraic(SubsystemSpec::modes(2, {1}), lyap);
  EXPECT_EQ(b.indices, (std::vector<int>{1, 2}));
  EXPECT_NEAR(b.lambda_a, 0.0, 1e-9);
  EXPECT_FALSE(b.generic_agrees);
  const auto a = subsystem_exponent_algebraic(SubsystemSpec::modes(2, {0}), lyap);
  EXPECT_EQ(a.indices, (std::vector<int>{0, 3}));
  EXPECT_NEAR(a.lambda_a, 0.0, 1e-9);
}

TEST(AlgebraicExponent, IndependentOfDarbouxBasisChoice) {
  Rng rng(64);
  const auto lyap = lyapunov_spectrum(coupled_inverted(1.0, 0.5, 0.3), 600.0, 0.05);
  const Matrix base = SubsystemSpec::modes(2, {0}).selector();
  const double ref = subsystem_exponent_algebraic(SubsystemSpec::modes(2, {0}), lyap).lambda_a;
  for (int trial = 0; trial < 20; ++trial) {
    const auto sub = SubsystemSpec::from_selector(symplectic_2x2(rng) * base, 1e-10);
    EXPECT_NEAR(subsystem_exponent_algebraic(sub, lyap).lambda_a, ref, 1e-9);
  }
}

TEST(AlgebraicExponent, BoundedByGenericSum) {
  Rng rng(65);
  for (int trial = 0; trial < 10; ++trial) {
    const auto ham = QuadraticHamiltonian::constant(quadent::testing::random_symmetric(6, rng));
    const auto lyap = lyapunov_from_propagation(run(ham, 200.0, 0.02, 4));
    for (int mode = 0; mode < 3; ++mode) {
      const auto rep = subsystem_exponent_algebraic(SubsystemSpec::modes(3, {mode}), lyap);
      EXPECT_GE(rep.lambda_a, -2.0 * lyap.residual - 1e-9);
      EXPECT_LE(rep.lambda_a, rep.generic_sum + 1e-12);
    }
  }
}

TEST(VolumetricExponent, StableFlowHasZeroSlope) {
  const auto rep = subsystem_exponent_volumetric(SubsystemSpec::modes(2, {0}),
                                                 QuadraticHamiltonian::constant(Matrix::Identity(4, 4)), 20.0,
                                                 0.05, CovarianceMatrix::vacuum(2));
  EXPECT_NEAR(rep.lambda_a, 0.0, std::max(1e-9, 3.0 * rep.slope_stderr));
}

TEST(VolumetricExponent, AgreesWithAlgebraicAndIgnoresInitialCovariance) {
  const auto ham = coupled_inverted(1.0, 0.5, 0.3);
  const auto series = run(ham, 600.0, 0.05);
  const auto lyap = lyapunov_from_propagation(series);
  const auto sub = SubsystemSpec::modes(2, {0});
  const double alg = subsystem_exponent_algebraic(sub, lyap).lambda_a;
  const auto vac = subsystem_exponent_volumetric(sub, series, CovarianceMatrix::vacuum(2));
  EXPECT_NEAR(vac.lambda_a, alg, std::max(0.02 * std::abs(alg), 2.0 * vac.slope_stderr));
  Rng rng(66);
  const auto other = subsystem_exponent_volumetric(
      sub, series, CovarianceMatrix(quadent::testing::random_covariance(2, rng, true)));
  EXPECT_NEAR(other.lambda_a, vac.lambda_a, std::max(1e-3, 2.0 * (vac.slope_stderr + other.slope_stderr)));
}

TEST(VolumetricExponent, PureStateComplementarity) {
  Rng rng(67);
  const auto series = run(coupled_inverted(0.8, 0.6, 0.4), 60.0, 0.01);
  const CovarianceMatrix g0(quadent::testing::random_covariance(2, rng, true));
  const auto a = subsystem_exponent_volumetric(SubsystemSpec::modes(2, {0}), series, g0);
  const auto b = subsystem_exponent_volumetric(SubsystemSpec::modes(2, {1}), series, g0);
  EXPECT_NEAR(a.lambda_a, b.lambda_a, std::max(1e-6, 2.0 * (a.slope_stderr + b.slope_stderr)));
}

TEST(VolumetricExponent, LongHorizonBeyondDenseOverflow) {
  const auto series = run(coupled_inverted(1.0, 0.5, 0.3), 600.0, 0.05, 20);
  EXPECT_FALSE(series.back().dense.has_value());
  Eigen::EigenSolver<Matrix> es(generator(coupled_inverted(1.0, 0.5, 0.3), 0.0), false);
  std::vector<double> re;
  for (Eigen::Index i = 0; i < 4; ++i) re.push_back(es.eigenvalues()(i).real());
  std::sort(re.rbegin(), re.rend());
  const auto rep = subsystem_exponent_volumetric(SubsystemSpec::modes(2, {1}), series, CovarianceMatrix::vacuum(2));
  EXPECT_NEAR(rep.lambda_a, re[0] + re[1], 1e-6);
}

TEST(VolumetricExponent, TooFewSamples) {
  PropagationOptions opts;
  opts.samples = 2;
  const auto series = propagate(coupled_inverted(1.0, 0.5, 0.3), 10.0, 0.01, opts);
  try {
    subsystem_exponent_volumetric(SubsystemSpec::modes(2, {0}), series, CovarianceMatrix::vacuum(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotConverged);
  }
}
