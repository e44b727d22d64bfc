#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "quadent/phase_space.hpp"
#include "quadent/stretch.hpp"

namespace quadent {

/// H(t) = 1/2 xi^T h(t) xi + f(t)^T xi.
class QuadraticHamiltonian {
 public:
  using MatrixFn = std::function<Matrix(double)>;
  using VectorFn = std::function<Vector(double)>;

  QuadraticHamiltonian(int n_modes, MatrixFn h, VectorFn f = {}, std::optional<double> period = {});
  static QuadraticHamiltonian constant(Matrix h, Vector f = {});

  int modes() const noexcept { return n_modes_; }
  Matrix h(double t) const;
  Vector f(double t) const;
  bool has_linear_term() const noexcept { return static_cast<bool>(f_) || constant_f_.size() > 0; }
  bool is_constant() const noexcept { return constant_h_.size() > 0; }
  std::optional<double> period() const noexcept { return period_; }

 private:
  int n_modes_;
  MatrixFn h_;
  VectorFn f_;
  std::optional<double> period_;
  Matrix constant_h_;
  Vector constant_f_;
};

/// K(t) = Omega h(t). Throws NonSymmetricH.
Matrix generator(const QuadraticHamiltonian& hamiltonian, double t);

struct PropagationOptions {
  /// Number of recorded intervals; samples land on step boundaries.
  int samples = 100;
  /// Ceiling on ||M Omega M^T - Omega|| / (1 + ||M||^2).
  double defect_ceiling = 1e-8;
  /// Newton-Schulz re-symplectification of every step matrix. Alters the
  /// trajectory; intended only for long horizons with large steps.
  bool symplectic_projection = false;
};

struct FlowSample {
  double t = 0.0;
  StretchFactor stretch;
  std::optional<Matrix> dense;  // dropped once entries would overflow
  Vector displacement;          // z(t) from z(0) = 0
  double defect = 0.0;          // relative symplectic defect
};

class PropagationResult {
 public:
  PropagationResult(std::vector<FlowSample> samples, double dt, int steps, double max_step_defect);

  const std::vector<FlowSample>& samples() const noexcept { return samples_; }
  std::vector<double> times() const;
  const FlowSample& back() const { return samples_.back(); }
  /// Sample whose time is closest to t.
  const FlowSample& nearest(double t) const;
  double dt() const noexcept { return dt_; }
  int steps() const noexcept { return steps_; }
  double max_defect() const;
  double max_step_defect() const noexcept { return max_step_defect_; }
  int modes() const { return samples_.front().stretch.dimension() / 2; }

 private:
  std::vector<FlowSample> samples_;
  double dt_;
  int steps_;
  double max_step_defect_;
};

/// Midpoint (second-order Magnus) propagation of dM/dt = K(t) M, M(0) = 1.
/// The effective step is t_final / n_steps <= dt; for periodic H it also
/// divides the period so step matrices can be reused. Throws StepTooLarge.
PropagationResult propagate(const QuadraticHamiltonian& hamiltonian, double t_final, double dt,
                            const PropagationOptions& options = {});

/// M G0 M^T. Throws DimensionMismatch.
CovarianceMatrix evolve_covariance(const CovarianceMatrix& g0, const Matrix& m);

struct PolarPair {
  Matrix t_part;  // symmetric positive-definite symplectic
  Matrix u_part;  // orthogonal symplectic
};

/// M = T u with T = (M M^T)^{1/2}, u = T^{-1} M. Throws SingularM.
PolarPair polar_decompose(const Matrix& m);

/// (1/tau) log M(tau). Throws NoRealLogarithm.
Matrix stroboscopic_generator(const Matrix& m_tau, double tau);

/// One Newton-Schulz step toward the symplectic group: S (3 - Y) / 2 with
/// Y = Omega^T S^T Omega S.
Matrix symplectic_projection_step(const Matrix& s);

}  // namespace quadent
