#include "quadent/phase_space.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "linalg_util.hpp"

namespace quadent {

ModeCount::ModeCount(int n_total, int n_a) : n_total_(n_total), n_a_(n_a) {
  if (n_total < 2 || n_a <= 0 || n_a >= n_total) {
    throw Error(ErrorCode::InvalidArgument, "mode split requires 0 < n_a < n_total");
  }
}

Matrix standard_omega(int n_modes) {
  if (n_modes < 1) throw Error(ErrorCode::InvalidArgument, "standard_omega needs n >= 1");
  Matrix omega = Matrix::Zero(2 * n_modes, 2 * n_modes);
  for (int k = 0; k < n_modes; ++k) {
    omega(2 * k, 2 * k + 1) = 1.0;
    omega(2 * k + 1, 2 * k) = -1.0;
  }
  return omega;
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double symplectic_defect(const Matrix& s) {
  if (s.rows() % 2 != 0 || s.cols() % 2 != 0) {
    throw Error(ErrorCode::DimensionMismatch, "symplectic_defect needs even dimensions");
  }
  const Matrix lhs = s * standard_omega(static_cast<int>(s.cols() / 2)) * s.transpose();
  return max_abs(lhs - standard_omega(static_cast<int>(s.rows() / 2)));
}

SubsystemSpec SubsystemSpec::from_selector(Matrix selector, double tol) {
  if (selector.rows() % 2 != 0 || selector.cols() % 2 != 0 || selector.rows() == 0 ||
      selector.rows() > selector.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "selector must be 2k x 2N with 0 < k <= N");
  }
  const double defect = symplectic_defect(selector);
  if (defect > tol) {
    std::ostringstream os;
    os << "selector rows are not a Darboux basis (defect " << defect << ")";
    throw Error(ErrorCode::NotDarboux, os.str());
  }
  return SubsystemSpec(std::move(selector));
}

SubsystemSpec SubsystemSpec::modes(int n_total, const std::vector<int>& mode_indices) {
  if (mode_indices.empty()) throw Error(ErrorCode::InvalidArgument, "empty mode list");
  Matrix f = Matrix::Zero(2 * static_cast<Eigen::Index>(mode_indices.size()), 2 * n_total);
  std::vector<bool> seen(static_cast<size_t>(std::max(n_total, 0)), false);
  for (size_t r = 0; r < mode_indices.size(); ++r) {
    const int m = mode_indices[r];
    if (m < 0 || m >= n_total || seen[static_cast<size_t>(m)]) {
      throw Error(ErrorCode::InvalidArgument, "mode index out of range or repeated");
    }
    seen[static_cast<size_t>(m)] = true;
    f(2 * static_cast<Eigen::Index>(r), 2 * m) = 1.0;
    f(2 * static_cast<Eigen::Index>(r) + 1, 2 * m + 1) = 1.0;
  }
  return SubsystemSpec(std::move(f));
}

SubsystemSpec SubsystemSpec::first(const ModeCount& split) {
  std::vector<int> idx(static_cast<size_t>(split.a()));
  for (int i = 0; i < split.a(); ++i) idx[static_cast<size_t>(i)] = i;
  return modes(split.total(), idx);
}

SubsystemSpec SubsystemSpec::second(const ModeCount& split) {
  std::vector<int> idx(static_cast<size_t>(split.b()));
  for (int i = 0; i < split.b(); ++i) idx[static_cast<size_t>(i)] = split.a() + i;
  return modes(split.total(), idx);
}

SubsystemSpec SubsystemSpec::compose(const SubsystemSpec& inner) const {
  if (inner.selector_.cols() != selector_.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "inner selector does not act on this subsystem");
  }
  return SubsystemSpec(inner.selector_ * selector_);
}

SpdMatrix::SpdMatrix(Matrix g, double symmetry_tol) {
  if (g.rows() != g.cols() || g.rows() == 0 || g.rows() % 2 != 0) {
    throw Error(ErrorCode::DimensionMismatch, "expected a non-empty square matrix of even size");
  }
  if (!g.allFinite()) throw Error(ErrorCode::NotPositiveDefinite, "matrix has non-finite entries");
  const double asym = max_abs(g - g.transpose());
  if (asym > symmetry_tol * std::max(1.0, max_abs(g))) {
    std::ostringstream os;
    os << "asymmetry " << asym;
    throw Error(ErrorCode::NotSymmetric, os.str());
  }
  g_ = 0.5 * (g + g.transpose());
  Eigen::LLT<Matrix> llt(g_);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::NotPositiveDefinite, "Cholesky factorization failed");
  }
  lower_ = llt.matrixL();
  for (Eigen::Index i = 0; i < lower_.rows(); ++i) {
    if (!(lower_(i, i) > 0.0)) throw Error(ErrorCode::NotPositiveDefinite, "zero pivot");
  }
}

SpdMatrix SpdMatrix::from_cholesky(Matrix lower) {
  if (lower.rows() != lower.cols() || lower.rows() == 0 || lower.rows() % 2 != 0) {
    throw Error(ErrorCode::DimensionMismatch, "Cholesky factor must be square of even size");
  }
  SpdMatrix out;
  out.lower_ = lower.triangularView<Eigen::Lower>();
  for (Eigen::Index i = 0; i < out.lower_.rows(); ++i) {
    if (!(out.lower_(i, i) > 0.0) || !std::isfinite(out.lower_(i, i))) {
      throw Error(ErrorCode::NotPositiveDefinite, "factor diagonal must be positive");
    }
  }
  out.g_ = out.lower_ * out.lower_.transpose();
  return out;
}

double SpdMatrix::log_det() const { return 2.0 * lower_.diagonal().array().log().sum(); }

Matrix SpdMatrix::inverse() const {
  const Matrix id = Matrix::Identity(g_.rows(), g_.cols());
  const Matrix linv = lower_.triangularView<Eigen::Lower>().solve(id);
  return linv.transpose() * linv;
}

namespace {

// Singular values of L^T Omega L come in equal pairs (nu, nu).
std::vector<double> spectrum_from_factor(const Matrix& lower) {
  const int n = static_cast<int>(lower.rows() / 2);
  const Matrix x = lower.transpose() * standard_omega(n) * lower;
  Eigen::JacobiSVD<Matrix> svd(x);
  const Vector s = svd.singularValues();
  std::vector<double> nu(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) nu[static_cast<size_t>(k)] = std::sqrt(s(2 * k) * s(2 * k + 1));
  return nu;
}

}  // namespace

std::vector<double> symplectic_spectrum(const SpdMatrix& g) { return spectrum_from_factor(g.cholesky()); }

CovarianceCheck validate_covariance(const Matrix& g, const Tolerances& tol) {
  CovarianceCheck out;
  try {
    SpdMatrix spd(g, tol.symmetry);
    const auto nu = symplectic_spectrum(spd);
    for (double v : nu) {
      out.minus_j2_spectrum.push_back(v * v);
      out.minus_j2_spectrum.push_back(v * v);
    }
    std::sort(out.minus_j2_spectrum.begin(), out.minus_j2_spectrum.end());
    const double smallest = out.minus_j2_spectrum.front();
    if (smallest < 1.0 - tol.uncertainty) {
      out.failure = ErrorCode::UncertaintyViolated;
      std::ostringstream os;
      os << "uncertainty check failed: min eigenvalue of -J^2 is " << smallest;
      out.detail = os.str();
      return out;
    }
    out.valid = true;
  } catch (const Error& e) {
    out.failure = e.code();
    out.detail = e.what();
  }
  return out;
}

CovarianceMatrix::CovarianceMatrix(Matrix g, const Tolerances& tol)
    : CovarianceMatrix(SpdMatrix(std::move(g), tol.symmetry), tol.uncertainty) {}

CovarianceMatrix::CovarianceMatrix(SpdMatrix g, double uncertainty_tol) : spd_(std::move(g)) {
  const auto nu = symplectic_spectrum(spd_);
  const double smallest = *std::min_element(nu.begin(), nu.end());
  if (smallest * smallest < 1.0 - uncertainty_tol) {
    std::ostringstream os;
    os << "uncertainty check failed: min eigenvalue of -J^2 is " << smallest * smallest;
    throw Error(ErrorCode::UncertaintyViolated, os.str());
  }
}

CovarianceMatrix CovarianceMatrix::vacuum(int n_modes) {
  return CovarianceMatrix(Matrix(Matrix::Identity(2 * n_modes, 2 * n_modes)));
}

GaussianState::GaussianState(CovarianceMatrix c, Vector z) : cov(std::move(c)), disp(std::move(z)) {
  if (disp.size() != cov.matrix().rows()) {
    throw Error(ErrorCode::DimensionMismatch, "displacement length must be 2N");
  }
  if (!disp.allFinite()) throw Error(ErrorCode::InvalidArgument, "displacement must be finite");
}

Matrix complex_structure(const CovarianceMatrix& g) {
  return g.matrix() * standard_omega(g.modes()).transpose();
}

std::vector<double> williamson_spectrum(const CovarianceMatrix& g) {
  auto nu = symplectic_spectrum(g.spd());
  // Roundoff can put pure-state values a hair below one.
  for (double& v : nu) v = std::max(v, 1.0);
  return nu;
}

bool is_pure(const CovarianceMatrix& g, double tol) {
  const Matrix j = complex_structure(g);
  const Matrix j2 = j * j;
  return max_abs(j2 + Matrix::Identity(j.rows(), j.cols())) <= tol;
}

SpdMatrix restrict(const SpdMatrix& g, const SubsystemSpec& sub) {
  if (sub.selector().cols() != g.dimension()) {
    throw Error(ErrorCode::DimensionMismatch, "selector width does not match matrix size");
  }
  return SpdMatrix::from_cholesky(detail::restricted_factor(sub.selector(), g.cholesky()));
}

CovarianceMatrix restrict(const CovarianceMatrix& g, const SubsystemSpec& sub) {
  return CovarianceMatrix(restrict(g.spd(), sub));
}

}  // namespace quadent
