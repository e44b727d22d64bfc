#include <gtest/gtest.h>

#include <quadent/phase_space.hpp>

#include <cmath>

#include "generators.hpp"

using namespace quadent;
using quadent::testing::Rng;

namespace {

// Independent route for the oracle: imaginary parts of eig(Omega G).
std::vector<double> spectrum_via_omega_g(const Matrix& g) {
  const int n = static_cast<int>(g.rows() / 2);
  Eigen::EigenSolver<Matrix> es(standard_omega(n) * g, false);
  std::vector<double> im;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()(i).imag() > 0.0) im.push_back(es.eigenvalues()(i).imag());
  }
  std::sort(im.rbegin(), im.rend());
  return im;
}

}  // namespace

TEST(StandardOmega, SingleModeBlock) {
  Matrix expected(2, 2);
  expected << 0, 1, -1, 0;
  EXPECT_EQ(standard_omega(1), expected);
}

TEST(StandardOmega, TwoModesBlockDiagonal) {
  const Matrix om = standard_omega(2);
  EXPECT_EQ(om.block(0, 0, 2, 2), standard_omega(1));
  EXPECT_EQ(om.block(2, 2, 2, 2), standard_omega(1));
  EXPECT_EQ(om.block(0, 2, 2, 2), Matrix::Zero(2, 2));
}

TEST(StandardOmega, SquaresToMinusIdentityAndIsOrthogonal) {
  for (int n = 1; n <= 5; ++n) {
    const Matrix om = standard_omega(n);
    EXPECT_TRUE((om * om).isApprox(-Matrix::Identity(2 * n, 2 * n)));
    EXPECT_TRUE((om * om.transpose()).isIdentity());
    EXPECT_DOUBLE_EQ(om.determinant(), 1.0);
  }
  EXPECT_THROW(standard_omega(0), Error);
}

TEST(ComplexStructure, Vacuum) {
  const auto g = CovarianceMatrix::vacuum(2);
  const Matrix j = complex_structure(g);
  EXPECT_TRUE(j.isApprox(-standard_omega(2)));
  EXPECT_TRUE((j * j).isApprox(-Matrix::Identity(4, 4)));
}

TEST(ComplexStructure, ThermalAndSqueezed) {
  const CovarianceMatrix thermal(Matrix(2.0 * Matrix::Identity(2, 2)));
  const Matrix j = complex_structure(thermal);
  EXPECT_TRUE((-j * j).isApprox(4.0 * Matrix::Identity(2, 2)));

  const double r = 0.7;
  Matrix sq = Matrix::Zero(2, 2);
  sq(0, 0) = std::exp(2 * r);
  sq(1, 1) = std::exp(-2 * r);
  const Matrix js = complex_structure(CovarianceMatrix(sq));
  EXPECT_TRUE((js * js).isApprox(-Matrix::Identity(2, 2), 1e-12));
}

TEST(ValidateCovariance, VacuumIsValid) {
  const auto check = validate_covariance(Matrix::Identity(4, 4));
  EXPECT_TRUE(check.valid);
  ASSERT_EQ(check.minus_j2_spectrum.size(), 4u);
  for (double v : check.minus_j2_spectrum) EXPECT_NEAR(v, 1.0, 1e-14);
}

TEST(ValidateCovariance, NamesTheFailedCheck) {
  auto below = validate_covariance(0.5 * Matrix::Identity(2, 2));
  EXPECT_FALSE(below.valid);
  EXPECT_EQ(below.failure, ErrorCode::UncertaintyViolated);

  Matrix asym = Matrix::Identity(2, 2);
  asym(0, 1) = 0.1;
  EXPECT_EQ(validate_covariance(asym).failure, ErrorCode::NotSymmetric);

  Matrix indefinite = Matrix::Identity(2, 2);
  indefinite(1, 1) = -1.0;
  EXPECT_EQ(validate_covariance(indefinite).failure, ErrorCode::NotPositiveDefinite);

  try {
    CovarianceMatrix bad(Matrix(0.5 * Matrix::Identity(2, 2)));
    FAIL() << "expected an exception";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UncertaintyViolated);
  }
}

TEST(ValidateCovariance, SymplecticConjugatesOfVacuumAreValidAndPure) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix g = quadent::testing::random_covariance(3, rng, true);
    const auto check = validate_covariance(g);
    ASSERT_TRUE(check.valid) << check.detail;
    for (double v : check.minus_j2_spectrum) EXPECT_NEAR(v, 1.0, 1e-9);
  }
}

TEST(WilliamsonSpectrum, KnownCases) {
  for (double v : williamson_spectrum(CovarianceMatrix::vacuum(3))) EXPECT_DOUBLE_EQ(v, 1.0);
  const auto thermal = williamson_spectrum(CovarianceMatrix(Matrix(2.0 * Matrix::Identity(2, 2))));
  ASSERT_EQ(thermal.size(), 1u);
  EXPECT_NEAR(thermal[0], 2.0, 1e-14);
  for (double v : williamson_spectrum(CovarianceMatrix(quadent::testing::two_mode_squeezed(1.3)))) {
    EXPECT_NEAR(v, 1.0, 1e-10);
  }
}

TEST(WilliamsonSpectrum, MatchesOmegaGEigenvalueRoute) {
  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix g = quadent::testing::random_covariance(3, rng, false);
    const auto nu = williamson_spectrum(CovarianceMatrix(g));
    const auto oracle = spectrum_via_omega_g(g);
    ASSERT_EQ(oracle.size(), nu.size());
    double prod = 1.0;
    for (size_t k = 0; k < nu.size(); ++k) {
      EXPECT_NEAR(nu[k], oracle[k], 1e-9 * oracle[k]);
      prod *= nu[k] * nu[k];
    }
    EXPECT_NEAR(prod, g.determinant(), 1e-8 * g.determinant());
  }
}

TEST(WilliamsonSpectrum, SymplecticInvariance) {
  Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix g = quadent::testing::random_covariance(2, rng, false);
    const Matrix s = quadent::testing::random_symplectic(2, rng);
    const auto a = williamson_spectrum(CovarianceMatrix(g));
    const auto b = williamson_spectrum(CovarianceMatrix(Matrix(s * g * s.transpose())));
    for (size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-9 * a[k]);
  }
}

TEST(IsPure, BasicCases) {
  EXPECT_TRUE(is_pure(CovarianceMatrix::vacuum(2)));
  EXPECT_FALSE(is_pure(CovarianceMatrix(Matrix(2.0 * Matrix::Identity(2, 2)))));
  Rng rng(14);
  EXPECT_TRUE(is_pure(CovarianceMatrix(quadent::testing::random_covariance(2, rng, true))));
}

TEST(IsPure, AgreesWithSymplecticSpectrumOn1000States) {
  Rng rng(15);
  std::bernoulli_distribution coin(0.5);
  int disagreements = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const bool pure = coin(rng);
    // Mixed states keep nu >= 1.05 so the two tests are not probed at threshold.
    Matrix g = quadent::testing::random_covariance(2, rng, pure, 4.0);
    if (!pure) {
      Matrix d = Matrix::Identity(4, 4);
      d(0, 0) = d(1, 1) = 1.05 + 2.0 * std::uniform_real_distribution<double>(0, 1)(rng);
      const Matrix s = quadent::testing::random_symplectic(2, rng);
      g = s * d * s.transpose();
      g = 0.5 * (g + g.transpose());
    }
    const CovarianceMatrix cov(g);
    bool all_one = true;
    for (double v : williamson_spectrum(cov)) all_one = all_one && std::abs(v - 1.0) <= 1e-8;
    if (is_pure(cov) != all_one) ++disagreements;
  }
  EXPECT_EQ(disagreements, 0);
}

TEST(ValidateCovariance, AcceptsExactlyWhenSpectrumAboveOne) {
  Rng rng(16);
  std::uniform_real_distribution<double> scale(0.6, 1.4);
  for (int trial = 0; trial < 300; ++trial) {
    const Matrix g = scale(rng) * quadent::testing::random_covariance(2, rng, true);
    const auto check = validate_covariance(g);
    const auto nu = symplectic_spectrum(SpdMatrix(g));
    const double nu_min = *std::min_element(nu.begin(), nu.end());
    EXPECT_EQ(check.valid, nu_min * nu_min >= 1.0 - 1e-9);
  }
}

TEST(Restrict, Examples) {
  const auto vac = CovarianceMatrix::vacuum(2);
  const ModeCount split(2, 1);
  EXPECT_TRUE(restrict(vac, SubsystemSpec::first(split)).matrix().isIdentity());

  const double r = 0.8;
  const CovarianceMatrix tms(quadent::testing::two_mode_squeezed(r));
  const Matrix ga = restrict(tms, SubsystemSpec::first(split)).matrix();
  EXPECT_TRUE(ga.isApprox(std::cosh(2 * r) * Matrix::Identity(2, 2), 1e-12));

  Matrix block = Matrix::Identity(4, 4);
  block.block(2, 2, 2, 2) << 3.0, 1.0, 1.0, 2.0;
  const Matrix gb = restrict(CovarianceMatrix(block), SubsystemSpec::second(split)).matrix();
  EXPECT_TRUE(gb.isApprox(block.block(2, 2, 2, 2), 1e-13));
}

TEST(Restrict, DimensionMismatch) {
  const auto vac = CovarianceMatrix::vacuum(2);
  try {
    restrict(vac, SubsystemSpec::modes(3, {0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(Restrict, NestedEqualsComposed) {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const CovarianceMatrix g(quadent::testing::random_covariance(4, rng, false));
    const auto outer = SubsystemSpec::modes(4, {3, 0, 2});
    const auto inner = SubsystemSpec::modes(3, {2, 0});
    const Matrix nested = restrict(restrict(g, outer), inner).matrix();
    const Matrix direct = restrict(g, outer.compose(inner)).matrix();
    EXPECT_TRUE(nested.isApprox(direct, 1e-12));
  }
}

TEST(SubsystemSpec, RejectsNonDarbouxSelector) {
  Matrix f = Matrix::Zero(2, 4);
  f(0, 0) = 1.0;
  f(1, 1) = 2.0;
  try {
    SubsystemSpec::from_selector(f);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotDarboux);
  }
}

TEST(SubsystemSpec, RotatedSingleModePasses) {
  Rng rng(18);
  const Matrix u = quadent::testing::random_orthogonal_symplectic(2, rng);
  const Matrix f = SubsystemSpec::modes(2, {0}).selector() * u;
  EXPECT_NO_THROW(SubsystemSpec::from_selector(f, 1e-12));
}

TEST(ModeCount, RejectsDegenerateSplits) {
  EXPECT_THROW(ModeCount(2, 0), Error);
  EXPECT_THROW(ModeCount(2, 2), Error);
  const ModeCount s(5, 2);
  EXPECT_EQ(s.a() + s.b(), s.total());
}
