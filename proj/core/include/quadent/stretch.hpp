#pragma once

#include "quadent/phase_space.hpp"

namespace quadent {

/// Cholesky factor stored as exp(log_scale) * factor so that huge
/// covariance matrices never have to be formed.
struct ScaledFactor {
  Matrix factor;  // lower triangular, positive diagonal
  double log_scale = 0.0;

  int dimension() const noexcept { return static_cast<int>(factor.rows()); }
  int modes() const noexcept { return dimension() / 2; }
  double log_det() const;
  /// Natural logs of the symplectic eigenvalues, descending.
  std::vector<double> log_symplectic_spectrum() const;
  /// Only valid while exp(2 * log_scale) * entries stay finite.
  SpdMatrix to_spd() const;
  static ScaledFactor of(const SpdMatrix& g);
};

/// Singular value decomposition with logarithmic singular values.
struct LogSvd {
  Matrix left;        // columns = left singular vectors
  Vector log_sigma;   // descending
  Matrix right;       // columns = right singular vectors
};

/// A square matrix kept as basis * diag(exp(log_scales)) * rows with an
/// orthogonal basis and O(1) rows. Products of many steps stay representable
/// long after the dense matrix would overflow.
class StretchFactor {
 public:
  static StretchFactor identity(int dimension);
  static StretchFactor from_dense(const Matrix& m);
  /// basis * diag(exp(log_scales)) * basis^T for an orthogonal basis.
  static StretchFactor symmetric(Matrix basis, Vector log_scales);

  /// this <- e * this
  void left_multiply(const Matrix& e);

  const Matrix& basis() const noexcept { return basis_; }
  const Vector& log_scales() const noexcept { return log_scales_; }
  const Matrix& rows() const noexcept { return rows_; }
  int dimension() const noexcept { return static_cast<int>(basis_.rows()); }

  double max_log_scale() const;
  /// Dense product; entries overflow to inf beyond ~e^700.
  Matrix dense() const;
  /// ||M Omega M^T - Omega||_inf / (1 + ||M||_inf^2), evaluated without overflow.
  double relative_symplectic_defect() const;

  /// Singular values via one-sided Jacobi on the log-scaled rows.
  LogSvd svd() const;

  /// Cholesky factor of F M W W^T M^T F^T, F = selector, W = right factor.
  ScaledFactor gram_factor(const Matrix& selector, const Matrix& right) const;

  /// ln ||M^T ell||_2.
  double log_norm_transpose_times(const Vector& ell) const;

 private:
  Matrix basis_;
  Vector log_scales_;
  Matrix rows_;
};

/// Positive polar factor power T^alpha of M = T u, where T = (M M^T)^{1/2}.
StretchFactor polar_power(const LogSvd& svd_of_m, double alpha);

}  // namespace quadent
