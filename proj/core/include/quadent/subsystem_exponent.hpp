#pragma once

#include <string>
#include <vector>

#include "quadent/fit.hpp"
#include "quadent/lyapunov.hpp"

namespace quadent {

enum class ExponentMethod { Algebraic, Volumetric, Generic };

std::string to_string(ExponentMethod m);

struct ExponentReport {
  double lambda_a = 0.0;
  ExponentMethod method = ExponentMethod::Algebraic;
  std::vector<int> indices;     // selected Lyapunov indices (0-based), algebraic only
  std::vector<double> margins;  // relative independence margin per selected index
  double generic_sum = 0.0;     // sum of the 2 N_A largest exponents
  bool generic_agrees = false;
  double slope_stderr = 0.0;  // volumetric only
  LinearFit fit;              // volumetric only
};

/// Selector rows, re-checked to be a Darboux basis. Throws NotDarboux.
Matrix darboux_rows(const SubsystemSpec& sub, double tol = 1e-10);

/// F with F(i, j) = theta_i . ell_j, so theta = F * basis.
Matrix expansion_matrix(const Matrix& theta, const LyapunovData& lyap);

struct ColumnSelection {
  std::vector<int> indices;
  std::vector<double> margins;
};

/// Greedy left-to-right scan keeping column j when its residual after projecting
/// onto the kept columns exceeds tol_rel * ||column j||. Throws RankDeficient.
ColumnSelection select_columns(const Matrix& f, double tol_rel = 1e-8);

/// Cluster-aware variant: each exponent cluster contributes its rank increase
/// over the span of earlier clusters, assigned to its leading indices.
ColumnSelection select_columns(const Matrix& f, const std::vector<ExponentCluster>& clusters, double tol_rel);

/// Sum of the exponents picked by the selection. Throws RankDeficient.
ExponentReport subsystem_exponent_algebraic(const SubsystemSpec& sub, const LyapunovData& lyap,
                                            double tol_rel = 1e-8);

/// Least-squares slope of 1/2 ln det(F M(t) G0 M(t)^T F^T) over samples with
/// t in [window_start * t_end, t_end]. Throws NotConverged for too few samples.
ExponentReport subsystem_exponent_volumetric(const SubsystemSpec& sub, const PropagationResult& series,
                                             const CovarianceMatrix& g0, double window_start = 0.5);

ExponentReport subsystem_exponent_volumetric(const SubsystemSpec& sub, const QuadraticHamiltonian& hamiltonian,
                                             double t_star, double dt, const CovarianceMatrix& g0);

/// 1/2 ln det(F M G0 M^T F^T) evaluated without forming M.
double restricted_log_volume(const SubsystemSpec& sub, const StretchFactor& m, const CovarianceMatrix& g0);

}  // namespace quadent
