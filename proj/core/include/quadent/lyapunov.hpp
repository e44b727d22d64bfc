#pragma once

#include <vector>

#include "quadent/dynamics.hpp"

namespace quadent {

struct LyapunovOptions {
  /// Converged when residual <= threshold_factor * (1 + |lambda_1|).
  double threshold_factor = 1e-3;
  /// Minimum gap separating exponent clusters.
  double cluster_gap = 1e-6;
  /// lyapunov_spectrum throws NotConverged when set.
  bool require_convergence = true;
};

/// Consecutive exponents [first, first + size) treated as one block.
struct ExponentCluster {
  int first = 0;
  int size = 1;
};

struct LyapunovData {
  std::vector<double> exponents;  // descending
  Matrix basis;                   // row i = ell^i
  double horizon = 0.0;
  double residual = 0.0;
  double threshold = 0.0;
  bool converged = false;
  std::vector<ExponentCluster> clusters;

  int dimension() const noexcept { return static_cast<int>(exponents.size()); }
  /// Index of the cluster containing exponent i.
  int cluster_of(int i) const;
};

/// ln(M M^T) / (2t) from the SVD of a dense M. Throws SingularM.
Matrix limiting_matrix_estimate(const Matrix& m, double t);
/// Same from a stretch factor; valid far beyond the dense overflow horizon.
Matrix limiting_matrix_estimate(const StretchFactor& m, double t);

/// Spectrum at the final sample with the halving residual against the sample nearest t/2.
LyapunovData lyapunov_from_propagation(const PropagationResult& series, const LyapunovOptions& options = {});

/// Propagates to t_star and estimates the spectrum. Throws NotConverged.
LyapunovData lyapunov_spectrum(const QuadraticHamiltonian& hamiltonian, double t_star, double dt,
                               const LyapunovOptions& options = {});

struct ExponentEstimate {
  double value = 0.0;
  double residual = 0.0;
};

/// ln ||M(t)^T ell|| / t at the final horizon with its halving residual.
/// Throws NotConverged when the residual exceeds `threshold` (if positive).
ExponentEstimate vector_exponent(const PropagationResult& series, const Vector& ell, double threshold = 0.0);

struct RegularityVerdict {
  bool regular = false;
  double max_violation = 0.0;
};

/// |lambda_k + lambda_{2N+1-k}| <= tol for all k.
RegularityVerdict regularity_check(const LyapunovData& data, double tol);

struct PolarSpectra {
  std::vector<double> of_m;
  std::vector<double> of_t;
  std::vector<double> of_sqrt_t;
  double residual = 0.0;
  double deviation_t = 0.0;       // max |lambda(T) - lambda(M)|
  double deviation_sqrt_t = 0.0;  // max |lambda(sqrt T) - lambda(M)/2|
  bool consistent = false;        // both deviations within 2 * residual + 1e-9
  /// T came from a dense polar decomposition rather than from the log-SVD of M.
  bool dense_route = false;
};

/// Exponents of M(t), of its polar factor T(t) and of sqrt(T(t)). Throws NotConverged
/// when the series has not converged and `options.require_convergence` is set.
PolarSpectra polar_factor_exponents(const PropagationResult& series, const LyapunovOptions& options = {});

}  // namespace quadent
