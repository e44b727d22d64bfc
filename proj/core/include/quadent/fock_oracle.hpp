#pragma once

#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "quadent/dynamics.hpp"
#include "quadent/fit.hpp"
#include "quadent/phase_space.hpp"

namespace quadent {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

struct FockConfig {
  int n_modes = 2;
  int cutoff = 20;  // levels per mode, 0 .. cutoff - 1
  double dt = 0.01;
  double leak_ceiling = 1e-6;
  long long max_dimension = 2048;

  /// Throws InvalidArgument.
  void validate() const;
  long long dimension() const;
};

/// Pure state on the truncated number basis; mode 0 is the most significant index.
class FockState {
 public:
  FockState(int n_modes, int cutoff, CVector amplitudes);

  static FockState vacuum(int n_modes, int cutoff);
  static FockState basis(int cutoff, const std::vector<int>& occupations);
  /// Product of coherent states, renormalized after truncation.
  static FockState coherent(int cutoff, const std::vector<Complex>& alphas);
  /// Even cat (|alpha> + |-alpha>) on `mode`, vacuum elsewhere.
  static FockState cat(int n_modes, int cutoff, int mode, Complex alpha);
  /// Normalized sum of coefficient * |occupations>.
  static FockState superposition(int cutoff, const std::vector<std::pair<std::vector<int>, Complex>>& terms);

  int modes() const noexcept { return n_modes_; }
  int cutoff() const noexcept { return cutoff_; }
  const CVector& amplitudes() const noexcept { return amp_; }
  double norm() const { return amp_.norm(); }
  /// Largest population of the top two levels over all modes.
  double leak() const;

 private:
  int n_modes_;
  int cutoff_;
  CVector amp_;
};

/// Ladder-built quadratures on the truncated space, each embedded in the full
/// tensor product: ops[2i] = q_i, ops[2i + 1] = p_i.
struct Quadratures {
  std::vector<CMatrix> single;  // q, p on one mode (cutoff x cutoff)
  std::vector<CMatrix> ops;
};

Quadratures build_quadratures(const FockConfig& cfg);

/// 1/2 sum h_ab (xi_a xi_b + xi_b xi_a) / 2 + sum f_a xi_a. Throws NonHermitian.
CMatrix build_hamiltonian(const QuadraticHamiltonian& hamiltonian, double t, const FockConfig& cfg);

struct FockSample {
  double t = 0.0;
  FockState state;
  double leak = 0.0;
  double norm_drift = 0.0;
  bool trusted = true;
};

struct FockTrajectory {
  std::vector<FockSample> samples;
  /// First sample time whose leak exceeded the ceiling, if any.
  std::optional<double> leak_time;
  double max_norm_drift_rate = 0.0;
};

/// Unitary evolution sampled `samples` times. Constant H uses one eigendecomposition;
/// otherwise each step applies exp(-i h H(t_mid)), cached over one period when possible.
/// Throws TruncationLeak when psi0 already leaks, NotConverged on norm drift above 1e-8 per unit time.
FockTrajectory evolve_fock(const FockState& psi0, const QuadraticHamiltonian& hamiltonian, double t_final,
                           const FockConfig& cfg, int samples = 200);

/// Entanglement entropy of the modes in `subsystem` from the Schmidt decomposition.
double reduced_entropy(const FockState& psi, const std::vector<int>& subsystem);

/// First and second moments; exact for the truncated state itself. Throws TruncationLeak.
GaussianState covariance_of(const FockState& psi, double leak_ceiling = 1e-6);

struct GrowthOptions {
  /// Fit window starts at this fraction of the trusted horizon.
  double window_start = 0.5;
  int min_window_points = 5;
  double relative_tolerance = 0.10;
};

struct GrowthVerification {
  LinearFit fit;
  double window_begin = 0.0;
  double window_end = 0.0;
  double trusted_end = 0.0;
  double reference_rate = 0.0;  // Lambda_A supplied by the caller
  double relative_error = 0.0;
  bool within_tolerance = false;
  /// S(psi(t)) <= S_vn of the Gaussian state with the same moments + 1e-6 at every trusted time.
  bool gaussian_bound_respected = true;
  double max_bound_excess = 0.0;
  std::vector<double> times;
  std::vector<double> entropies;
  std::vector<double> gaussian_entropies;
};

/// Slope of the reduced entropy over the trusted window. Throws WindowTooShort.
GrowthVerification verify_linear_growth(const FockTrajectory& trajectory, const std::vector<int>& subsystem,
                                        double reference_rate, const GrowthOptions& options = {});

}  // namespace quadent
