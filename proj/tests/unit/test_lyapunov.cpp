#include <gtest/gtest.h>

#include <quadent/lyapunov.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "generators.hpp"

using namespace quadent;
using quadent::testing::Rng;

namespace {

QuadraticHamiltonian inverted_oscillator() {
  Matrix h = Matrix::Zero(2, 2);
  h(0, 0) = -1.0;
  h(1, 1) = 1.0;
  return QuadraticHamiltonian::constant(h);
}

QuadraticHamiltonian free_particle() {
  Matrix h = Matrix::Zero(2, 2);
  h(1, 1) = 1.0;
  return QuadraticHamiltonian::constant(h);
}

QuadraticHamiltonian driven_oscillator(double eps) {
  return QuadraticHamiltonian(
      1,
      [eps](double t) {
        Matrix h = Matrix::Identity(2, 2);
        h(0, 0) = 1.0 + eps * std::cos(2.0 * t);
        return h;
      },
      {}, std::numbers::pi);
}

std::vector<double> sorted_real_parts(const Matrix& k) {
  Eigen::EigenSolver<Matrix> es(k, false);
  std::vector<double> re;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) re.push_back(es.eigenvalues()(i).real());
  std::sort(re.rbegin(), re.rend());
  return re;
}

PropagationResult run(const QuadraticHamiltonian& h, double t, double dt, int samples = 20) {
  PropagationOptions opts;
  opts.samples = samples;
  return propagate(h, t, dt, opts);
}

}  // namespace

TEST(LimitingMatrix, Examples) {
  EXPECT_TRUE(limiting_matrix_estimate(Matrix::Identity(4, 4), 3.0).isZero(1e-15));
  const double lam = 0.7, t = 5.0;
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = std::exp(lam * t);
  m(1, 1) = std::exp(-lam * t);
  Matrix expected = Matrix::Zero(2, 2);
  expected(0, 0) = lam;
  expected(1, 1) = -lam;
  EXPECT_LE(max_abs(limiting_matrix_estimate(m, t) - expected), 1e-14);
}

TEST(LimitingMatrix, MetastableDecaysLikeLogOverT) {
  Matrix f = Matrix::Zero(4, 4);
  f(0, 2) = 1.0;
  f(3, 1) = -1.0;
  double previous = 1e9;
  for (double t : {10.0, 100.0, 1000.0, 10000.0}) {
    const Matrix m = Matrix::Identity(4, 4) + t * f;
    const double norm = max_abs(limiting_matrix_estimate(m, t));
    EXPECT_LE(norm, 1.1 * std::log(t) / t);
    EXPECT_LT(norm, previous);
    previous = norm;
  }
}

TEST(LimitingMatrix, StretchRouteMatchesDense) {
  Rng rng(51);
  const Matrix m = quadent::testing::random_symplectic(2, rng, 0.8);
  EXPECT_LE(max_abs(limiting_matrix_estimate(StretchFactor::from_dense(m), 2.0) - limiting_matrix_estimate(m, 2.0)),
            1e-12);
}

TEST(LyapunovSpectrum, InvertedOscillator) {
  const auto d = lyapunov_spectrum(inverted_oscillator(), 20.0, 0.01);
  ASSERT_EQ(d.dimension(), 2);
  EXPECT_NEAR(d.exponents[0], 1.0, 1e-10);
  EXPECT_NEAR(d.exponents[1], -1.0, 1e-10);
  EXPECT_TRUE(d.converged);
  EXPECT_LE(max_abs(d.basis * d.basis.transpose() - Matrix::Identity(2, 2)), 1e-10);
}

TEST(LyapunovSpectrum, HarmonicOscillatorIsZero) {
  const auto d = lyapunov_spectrum(QuadraticHamiltonian::constant(Matrix::Identity(4, 4)), 50.0, 0.05);
  for (double e : d.exponents) EXPECT_NEAR(e, 0.0, 1e-10);
  ASSERT_EQ(d.clusters.size(), 1u);
  EXPECT_EQ(d.clusters[0].size, 4);
}

TEST(LyapunovSpectrum, DrivenOscillatorMatchesFloquetMultiplier) {
  const auto ham = driven_oscillator(0.4);
  const double tau = std::numbers::pi;
  const Matrix one = *propagate(ham, tau, tau / 200).back().dense;
  Eigen::EigenSolver<Matrix> es(one, false);
  const double mu = std::max(std::abs(es.eigenvalues()(0)), std::abs(es.eigenvalues()(1)));
  const double floquet = std::log(mu) / tau;
  const auto d = lyapunov_from_propagation(run(ham, 200 * tau, tau / 200));
  ASSERT_TRUE(d.converged);
  EXPECT_NEAR(d.exponents[0], floquet, 2.0 * d.residual + 1e-9);
  EXPECT_NEAR(d.exponents[1], -floquet, 2.0 * d.residual + 1e-9);
}

TEST(LyapunovSpectrum, NotConvergedWhenHorizonTooShort) {
  try {
    lyapunov_spectrum(free_particle(), 5.0, 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotConverged);
  }
}

TEST(LyapunovSpectrum, TimeIndependentMatchesEigenvaluesOfGenerator) {
  Rng rng(52);
  for (int trial = 0; trial < 10; ++trial) {
    const auto ham = QuadraticHamiltonian::constant(quadent::testing::random_symmetric(4, rng));
    const double horizon = 2000.0;
    const auto d = lyapunov_from_propagation(run(ham, horizon, 0.1));
    const auto re = sorted_real_parts(generator(ham, 0.0));
    // Rotating components make the halving residual undershoot; O(1/t) is the honest floor.
    const double tol = std::max(2.0 * d.residual, 2.0 / horizon);
    for (size_t i = 0; i < re.size(); ++i) EXPECT_NEAR(d.exponents[i], re[i], tol);
    const auto verdict = regularity_check(d, tol);
    EXPECT_TRUE(verdict.regular) << verdict.max_violation;
  }
}

TEST(LyapunovSpectrum, TraceFreeOrthonormalAndStableUnderRefinement) {
  Rng rng(53);
  const Matrix h0 = quadent::testing::random_symmetric(4, rng);
  const Matrix h1 = quadent::testing::random_symmetric(4, rng);
  const double tau = 2.0;
  QuadraticHamiltonian ham(
      2, [=](double t) { Matrix h = h0 + std::cos(std::numbers::pi * t) * h1; return h; }, {}, tau);
  const auto coarse = lyapunov_from_propagation(run(ham, 100.0, 0.02));
  const auto fine = lyapunov_from_propagation(run(ham, 100.0, 0.01));
  double trace = 0.0;
  for (size_t i = 0; i < coarse.exponents.size(); ++i) {
    trace += coarse.exponents[i];
    EXPECT_NEAR(coarse.exponents[i], fine.exponents[i], std::max(coarse.residual, 1e-6));
  }
  EXPECT_NEAR(trace, 0.0, 1e-8);
  EXPECT_LE(max_abs(coarse.basis * coarse.basis.transpose() - Matrix::Identity(4, 4)), 1e-10);
  EXPECT_TRUE(std::is_sorted(coarse.exponents.rbegin(), coarse.exponents.rend()));
}

TEST(Regularity, Examples) {
  const auto inv = lyapunov_spectrum(inverted_oscillator(), 20.0, 0.01);
  EXPECT_TRUE(regularity_check(inv, 1e-9).regular);

  const auto free = lyapunov_spectrum(free_particle(), 1e4, 1.0);
  EXPECT_TRUE(regularity_check(free, 2.0 * free.residual).regular);
  for (double e : free.exponents) EXPECT_NEAR(e, 0.0, 2e-3);

  LyapunovData fake;
  fake.exponents = {1.0, -0.5};
  const auto v = regularity_check(fake, 1e-3);
  EXPECT_FALSE(v.regular);
  EXPECT_NEAR(v.max_violation, 0.5, 1e-15);
}

TEST(VectorExponent, Examples) {
  const auto series = run(inverted_oscillator(), 20.0, 0.01);
  const auto d = lyapunov_from_propagation(series);
  const Vector top = d.basis.row(0).transpose();
  EXPECT_NEAR(vector_exponent(series, top).value, d.exponents[0], 1e-9);

  Rng rng(54);
  const Vector generic = quadent::testing::random_gaussian(2, 1, rng);
  const auto e = vector_exponent(series, generic);
  EXPECT_NEAR(e.value, 1.0, 2.0 * e.residual + 1e-9);

  Matrix f = Matrix::Zero(4, 4);
  f(1, 2) = f(2, 1) = 1.0;
  const auto meta = run(QuadraticHamiltonian::constant(f), 1e4, 1.0);
  const auto em = vector_exponent(meta, quadent::testing::random_gaussian(4, 1, rng));
  EXPECT_NEAR(em.value, 0.0, 2e-3);
  EXPECT_THROW(vector_exponent(meta, Vector::Zero(4)), Error);
}

TEST(PolarFactorExponents, OrthogonalFlowIsZeroEverywhere) {
  const auto p = polar_factor_exponents(run(QuadraticHamiltonian::constant(Matrix::Identity(2, 2)), 10.0, 0.01));
  for (size_t i = 0; i < 2; ++i) {
    EXPECT_NEAR(p.of_m[i], 0.0, 1e-10);
    EXPECT_NEAR(p.of_t[i], 0.0, 1e-10);
    EXPECT_NEAR(p.of_sqrt_t[i], 0.0, 1e-10);
  }
  EXPECT_TRUE(p.consistent);
}

TEST(PolarFactorExponents, InvertedOscillatorClosedForm) {
  for (double horizon : {6.0, 40.0}) {
    const auto p = polar_factor_exponents(run(inverted_oscillator(), horizon, 0.01));
    EXPECT_NEAR(p.of_m[0], 1.0, 1e-9);
    EXPECT_NEAR(p.of_t[0], 1.0, 1e-9);
    EXPECT_NEAR(p.of_sqrt_t[0], 0.5, 1e-9);
    EXPECT_NEAR(p.of_sqrt_t[1], -0.5, 1e-9);
    EXPECT_TRUE(p.consistent);
  }
}

TEST(PolarFactorExponents, RandomUnstableTwoModeFlows) {
  Rng rng(55);
  int tested = 0;
  for (int trial = 0; trial < 40 && tested < 10; ++trial) {
    const auto ham = QuadraticHamiltonian::constant(quadent::testing::random_symmetric(4, rng));
    if (sorted_real_parts(generator(ham, 0.0)).front() < 0.05) continue;
    ++tested;
    const auto p = polar_factor_exponents(run(ham, 2000.0, 0.1));
    EXPECT_TRUE(p.consistent) << p.deviation_t << ' ' << p.deviation_sqrt_t << ' ' << p.residual;
  }
  EXPECT_EQ(tested, 10);
}
