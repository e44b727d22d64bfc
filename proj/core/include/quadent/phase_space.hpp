#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "quadent/error.hpp"

namespace quadent {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Default numerical tolerances for the phase-space checks.
struct Tolerances {
  double symmetry = 1e-12;
  double uncertainty = 1e-9;
  double purity = 1e-8;
  double selector = 1e-12;
};

/// N total modes split as A = first n_a modes, B = the rest.
class ModeCount {
 public:
  ModeCount(int n_total, int n_a);
  int total() const noexcept { return n_total_; }
  int a() const noexcept { return n_a_; }
  int b() const noexcept { return n_total_ - n_a_; }

 private:
  int n_total_;
  int n_a_;
};

/// Omega for n modes in (q1,p1,...,qn,pn) order.
Matrix standard_omega(int n_modes);

/// Max-abs entry, the infinity "norm" used throughout for residuals.
double max_abs(const Matrix& m);

/// ||S Omega S^T - Omega|| for a (2k x 2n) row block S.
double symplectic_defect(const Matrix& s);

/// Linear map from the full quadratures to a subsystem's, stored as a
/// 2k x 2N selector whose rows form a Darboux basis.
class SubsystemSpec {
 public:
  /// Throws NotDarboux unless F Omega F^T = Omega to `tol`.
  static SubsystemSpec from_selector(Matrix selector, double tol = Tolerances{}.selector);
  /// Selector for a list of mode indices (0-based, in the given order).
  static SubsystemSpec modes(int n_total, const std::vector<int>& mode_indices);
  static SubsystemSpec first(const ModeCount& split);
  static SubsystemSpec second(const ModeCount& split);

  const Matrix& selector() const noexcept { return selector_; }
  int total_modes() const noexcept { return static_cast<int>(selector_.cols() / 2); }
  int modes() const noexcept { return static_cast<int>(selector_.rows() / 2); }

  /// `inner` selects inside this subsystem; result selects from the full system.
  SubsystemSpec compose(const SubsystemSpec& inner) const;

 private:
  explicit SubsystemSpec(Matrix selector) : selector_(std::move(selector)) {}
  Matrix selector_;
};

/// Symmetric positive-definite matrix with a cached Cholesky factor.
/// Does not enforce the uncertainty relation.
class SpdMatrix {
 public:
  /// Throws NotSymmetric / NotPositiveDefinite.
  explicit SpdMatrix(Matrix g, double symmetry_tol = Tolerances{}.symmetry);
  /// From a lower-triangular factor L with positive diagonal; the matrix is L L^T.
  static SpdMatrix from_cholesky(Matrix lower);

  const Matrix& matrix() const noexcept { return g_; }
  const Matrix& cholesky() const noexcept { return lower_; }
  int dimension() const noexcept { return static_cast<int>(g_.rows()); }
  int modes() const noexcept { return dimension() / 2; }
  double log_det() const;
  Matrix inverse() const;

 private:
  SpdMatrix() = default;
  Matrix g_;
  Matrix lower_;
};

/// Outcome of validate_covariance; never throws.
struct CovarianceCheck {
  bool valid = false;
  std::optional<ErrorCode> failure;
  std::string detail;
  std::vector<double> minus_j2_spectrum;  // ascending
};

CovarianceCheck validate_covariance(const Matrix& g, const Tolerances& tol = {});

/// A validated quantum covariance matrix (vacuum = identity).
class CovarianceMatrix {
 public:
  /// Throws the failing check's ErrorCode.
  explicit CovarianceMatrix(Matrix g, const Tolerances& tol = {});
  explicit CovarianceMatrix(SpdMatrix g, double uncertainty_tol = Tolerances{}.uncertainty);
  static CovarianceMatrix vacuum(int n_modes);

  const Matrix& matrix() const noexcept { return spd_.matrix(); }
  const SpdMatrix& spd() const noexcept { return spd_; }
  int modes() const noexcept { return spd_.modes(); }

 private:
  SpdMatrix spd_;
};

struct GaussianState {
  CovarianceMatrix cov;
  Vector disp;

  GaussianState(CovarianceMatrix c, Vector z);
};

/// J = G Omega^{-1}.
Matrix complex_structure(const CovarianceMatrix& g);

/// Symplectic eigenvalues nu_1 >= ... >= nu_N of any SPD matrix.
std::vector<double> symplectic_spectrum(const SpdMatrix& g);
/// Same, for a validated covariance matrix (all entries >= 1 up to tolerance).
std::vector<double> williamson_spectrum(const CovarianceMatrix& g);

bool is_pure(const CovarianceMatrix& g, double tol = Tolerances{}.purity);

/// F G F^T. Throws DimensionMismatch.
CovarianceMatrix restrict(const CovarianceMatrix& g, const SubsystemSpec& sub);
SpdMatrix restrict(const SpdMatrix& g, const SubsystemSpec& sub);

}  // namespace quadent
