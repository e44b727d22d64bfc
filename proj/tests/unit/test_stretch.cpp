#include <gtest/gtest.h>

#include <quadent/stretch.hpp>

#include <cmath>

#include "generators.hpp"

using namespace quadent;
using quadent::testing::Rng;

namespace {

StretchFactor product_of(const std::vector<Matrix>& steps) {
  StretchFactor s = StretchFactor::identity(static_cast<int>(steps.front().rows()));
  for (const auto& e : steps) s.left_multiply(e);
  return s;
}

}  // namespace

TEST(StretchFactor, DenseProductMatchesDirectMultiplication) {
  Rng rng(41);
  std::vector<Matrix> steps;
  Matrix direct = Matrix::Identity(4, 4);
  for (int k = 0; k < 30; ++k) {
    steps.push_back(quadent::testing::random_symplectic(2, rng, 0.3));
    direct = steps.back() * direct;
  }
  const StretchFactor s = product_of(steps);
  EXPECT_LE(max_abs(s.dense() - direct), 1e-10 * max_abs(direct));
  EXPECT_LE(max_abs(s.basis().transpose() * s.basis() - Matrix::Identity(4, 4)), 1e-12);
}

TEST(StretchFactor, SvdMatchesJacobiSvdOfDenseProduct) {
  Rng rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix m = quadent::testing::random_symplectic(3, rng, 0.8);
    const StretchFactor s = StretchFactor::from_dense(m);
    const LogSvd ls = s.svd();
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    for (int i = 0; i < 6; ++i) {
      EXPECT_NEAR(ls.log_sigma(i), std::log(svd.singularValues()(i)), 1e-10);
    }
    const Matrix rebuilt = ls.left * ls.log_sigma.array().exp().matrix().asDiagonal() * ls.right.transpose();
    EXPECT_LE(max_abs(rebuilt - m), 1e-10 * max_abs(m));
  }
}

TEST(StretchFactor, GradedSpectrumBeyondOverflowStaysAccurate) {
  // diag(e^{lt}, e^{-lt}) rotated: the log singular values are exact.
  Rng rng(43);
  const Matrix q = quadent::testing::random_orthogonal_symplectic(2, rng);
  Vector logs(4);
  logs << 1500.0, 300.0, -300.0, -1500.0;
  const StretchFactor s = StretchFactor::symmetric(q, logs);
  const LogSvd ls = s.svd();
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(ls.log_sigma(i), logs(i), 1e-9 * (1 + std::abs(logs(i))));
  EXPECT_NEAR(s.max_log_scale(), 1500.0, 1e-12);
  EXPECT_LE(s.relative_symplectic_defect(), 1e-12);
}

TEST(StretchFactor, LongHyperbolicProductMatchesClosedForm) {
  // Inverted oscillator: M(t) = [[cosh t, sinh t], [sinh t, cosh t]].
  Matrix k(2, 2);
  k << 0, 1, 1, 0;
  const double h = 0.5;
  const Matrix step = expm(h * k);
  StretchFactor s = StretchFactor::identity(2);
  for (int n = 0; n < 4000; ++n) s.left_multiply(step);
  const LogSvd ls = s.svd();
  const double t = 4000 * h;
  EXPECT_NEAR(ls.log_sigma(0) / t, 1.0, 1e-12);
  EXPECT_NEAR(ls.log_sigma(1) / t, -1.0, 1e-12);
  EXPECT_NEAR(std::abs(ls.left(0, 0)), std::sqrt(0.5), 1e-10);
  EXPECT_TRUE(std::isinf(s.dense().cwiseAbs().maxCoeff()));
}

TEST(StretchFactor, GramFactorMatchesDenseCholesky) {
  Rng rng(44);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix m = quadent::testing::random_symplectic(3, rng, 0.6);
    const Matrix g0 = quadent::testing::random_covariance(3, rng, trial % 2 == 0);
    const Matrix w = Eigen::LLT<Matrix>(g0).matrixL();
    const Matrix f = SubsystemSpec::modes(3, {2, 0}).selector();
    const ScaledFactor sf = StretchFactor::from_dense(m).gram_factor(f, w);
    const Matrix dense = f * m * g0 * m.transpose() * f.transpose();
    EXPECT_NEAR(sf.log_det(), std::log(dense.determinant()), 1e-9);
    EXPECT_LE(max_abs(sf.to_spd().matrix() - dense), 1e-9 * max_abs(dense));
  }
}

TEST(StretchFactor, GramLogDetAtLargeHorizon) {
  Matrix k(2, 2);
  k << 0, 1, 1, 0;
  StretchFactor s = StretchFactor::identity(2);
  const Matrix step = expm(k);
  for (int n = 0; n < 1000; ++n) s.left_multiply(step);
  Matrix f(1, 2);
  f << 1.0, 0.0;
  // ln (e1^T M M^T e1)/2 with M M^T = M(2t): cosh(2t)/...; asymptotically t - ln 2 / 2.
  const ScaledFactor sf = s.gram_factor(f, Matrix::Identity(2, 2));
  EXPECT_NEAR(0.5 * sf.log_det(), 1000.0 - 0.5 * std::log(2.0), 1e-9);
}

TEST(StretchFactor, LogNormTransposeTimes) {
  Rng rng(45);
  const Matrix m = quadent::testing::random_symplectic(2, rng, 0.7);
  const Vector ell = quadent::testing::random_gaussian(4, 1, rng);
  EXPECT_NEAR(StretchFactor::from_dense(m).log_norm_transpose_times(ell), std::log((m.transpose() * ell).norm()),
              1e-12);
}

TEST(PolarPower, HalfPowerSquaresBackToPolarFactor) {
  Rng rng(46);
  const Matrix m = quadent::testing::random_symplectic(2, rng, 0.7);
  const LogSvd ls = StretchFactor::from_dense(m).svd();
  const Matrix t = polar_power(ls, 1.0).dense();
  const Matrix r = polar_power(ls, 0.5).dense();
  EXPECT_LE(max_abs(r * r - t), 1e-10 * max_abs(t));
  EXPECT_LE(max_abs(t * t - m * m.transpose()), 1e-9 * max_abs(t * t));
}

TEST(ScaledFactor, SymplecticSpectrumMatchesDense) {
  Rng rng(47);
  for (int trial = 0; trial < 20; ++trial) {
    const SpdMatrix g(quadent::testing::random_covariance(2, rng, false));
    const auto dense = symplectic_spectrum(g);
    const auto logs = ScaledFactor::of(g).log_symplectic_spectrum();
    for (size_t k = 0; k < dense.size(); ++k) EXPECT_NEAR(logs[k], std::log(dense[k]), 1e-10);
  }
}

TEST(ScaledFactor, SymplecticSpectrumResolvesWidelySeparatedValues) {
  // G = S^T diag(nu) S with nu = (e^80, e^40, 3) never formed densely; the
  // triangular factor comes from a row-graded QR of diag(sqrt nu) S.
  Rng rng(47);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix s = quadent::testing::random_symplectic(3, rng, 0.5);
    const std::vector<double> log_nu{80.0, 40.0, std::log(3.0)};
    Matrix graded = s;
    for (int k = 0; k < 3; ++k) graded.middleRows(2 * k, 2) *= std::exp(0.5 * log_nu[static_cast<size_t>(k)]);
    Eigen::HouseholderQR<Matrix> qr(graded);
    Matrix lower = Matrix(qr.matrixQR().triangularView<Eigen::Upper>()).transpose();
    for (int i = 0; i < 6; ++i) {
      if (lower(i, i) < 0.0) lower.col(i) *= -1.0;
    }
    const auto spectrum = ScaledFactor{lower, 0.0}.log_symplectic_spectrum();
    ASSERT_EQ(spectrum.size(), 3u);
    for (size_t k = 0; k < 3; ++k) EXPECT_NEAR(spectrum[k], log_nu[k], 1e-8) << "trial " << trial << " k " << k;
  }
}
