#pragma once

#include <optional>
#include <string>
#include <vector>

#include "quadent/entropy.hpp"
#include "quadent/stretch.hpp"

namespace quadent {

struct FamilyMember {
  Matrix selector;  // 2 N_i x 2N, rows a Darboux basis
  double weight = 0.0;
};

/// Weighted subsystem family satisfying the scaling condition sum p_i N_i = N.
class SubsystemFamily {
 public:
  /// Throws NotDarboux, InvalidArgument (negative weight or scaling violated).
  static SubsystemFamily make(std::vector<FamilyMember> members, double tol = 1e-12);
  /// {F_A, F_B, F_A M, F_B M} with weights 1/2.
  static SubsystemFamily mutual_information_pair(const Matrix& m, const ModeCount& split);
  /// {identity} with weight 1.
  static SubsystemFamily full_system(int n_modes);

  const std::vector<FamilyMember>& members() const noexcept { return members_; }
  int modes() const noexcept { return n_modes_; }

 private:
  std::vector<FamilyMember> members_;
  int n_modes_ = 0;
};

/// S_as(G) - sum_i p_i S_as(F_i G F_i^T).
double gss_objective(const SpdMatrix& g, const SubsystemFamily& family);

/// ||G^{-1} - sum_i p_i F_i^T (F_i G F_i^T)^{-1} F_i||_inf / ||G^{-1}||_inf.
double stationarity_residual(const SpdMatrix& g, const SubsystemFamily& family);

/// I_as(G) + I_as(M G M^T) for the split A|B.
double gss_rhs(const SpdMatrix& g, const Matrix& m, const ModeCount& split);

struct MinimizeBudget {
  int max_iterations = 400;
  int max_evaluations = 400000;
  double gradient_tol = 1e-10;
  double fd_step = 1e-6;
  /// Start also from M^{-1} (when PD) and (M M^T)^{-1/2}; otherwise only from 1.
  bool informed_starts = true;
  /// Condition number above which the argmin is flagged as running off to infinity.
  double divergence_condition = 1e8;
};

enum class BoundStatus { Converged, BudgetExhausted, Diverging };
std::string to_string(BoundStatus s);

struct BoundReport {
  double value = 0.0;
  std::optional<Matrix> argmin_g;
  double residual = 0.0;
  int iterations = 0;
  BoundStatus status = BoundStatus::Converged;
  double argmin_condition = 1.0;
  std::vector<double> trace;  // objective values of the winning start
  std::string start;          // which start produced the best value
};

/// Local minimum of I_as(G) + I_as(M G M^T) over PD G = C C^T.
BoundReport gss_rhs_minimize(const Matrix& m, const ModeCount& split, const MinimizeBudget& budget = {});

/// Largest eigenvalue of G0.
double operator_norm(const CovarianceMatrix& g0);

/// S_as(A)(X) for X = U diag(exp(log_eig)) U^T given in spectral form.
double restricted_asymptotic_entropy(const Matrix& eigvecs, const Vector& log_eigs, const SubsystemSpec& sub);

/// S_as(A)(T) + S_as(B)(T) - N ln(e/2) - N_A ln(e ||G0|| / 2), T the positive polar
/// factor of M whose SVD is given.
double pure_state_growth_lower_bound(const LogSvd& m_svd, const CovarianceMatrix& g0, const ModeCount& split);
/// Dense variant; t must be PD symplectic.
double pure_state_growth_lower_bound(const Matrix& t, const CovarianceMatrix& g0, const ModeCount& split);

struct SquashedBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// lower = S_as(A)(T) + S_as(B)(T) - 2N ln(e/2) - N ln||G0||,
/// upper = 1/2 S_as(A)(T^2) + 1/2 S_as(B)(T^2) + (N/2) ln||G0||.
SquashedBounds squashed_bounds(const LogSvd& m_svd, const CovarianceMatrix& g0, const ModeCount& split);
SquashedBounds squashed_bounds(const Matrix& t, const CovarianceMatrix& g0, const ModeCount& split);

/// Spectral form of a dense symmetric PD matrix as a LogSvd (left = right).
LogSvd spectral_form(const Matrix& pd);

}  // namespace quadent
