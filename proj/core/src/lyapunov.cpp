#include "quadent/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace quadent {

int LyapunovData::cluster_of(int i) const {
  for (size_t c = 0; c < clusters.size(); ++c) {
    if (i >= clusters[c].first && i < clusters[c].first + clusters[c].size) return static_cast<int>(c);
  }
  throw Error(ErrorCode::InvalidArgument, "exponent index out of range");
}

Matrix limiting_matrix_estimate(const Matrix& m, double t) {
  if (!(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "t must be positive");
  if (m.rows() != m.cols()) throw Error(ErrorCode::DimensionMismatch, "M must be square");
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU);
  const Vector s = svd.singularValues();
  if (!(s(s.size() - 1) > 0.0) || !s.allFinite()) throw Error(ErrorCode::SingularM, "M is singular or overflowed");
  const Matrix& u = svd.matrixU();
  const Matrix l = u * (s.array().log() / t).matrix().asDiagonal() * u.transpose();
  return 0.5 * (l + l.transpose());
}

namespace {

Matrix limiting_from_svd(const LogSvd& svd, double t) {
  const Matrix l = svd.left * (svd.log_sigma / t).asDiagonal() * svd.left.transpose();
  return 0.5 * (l + l.transpose());
}

std::vector<ExponentCluster> make_clusters(const std::vector<double>& ex, double gap) {
  std::vector<ExponentCluster> out;
  for (int i = 0; i < static_cast<int>(ex.size()); ++i) {
    if (!out.empty() && ex[static_cast<size_t>(i - 1)] - ex[static_cast<size_t>(i)] <= gap) {
      ++out.back().size;
    } else {
      out.push_back({i, 1});
    }
  }
  return out;
}

const FlowSample& half_sample(const PropagationResult& series) {
  const FlowSample& last = series.back();
  const FlowSample& half = series.nearest(0.5 * last.t);
  if (!(half.t > 0.0) || &half == &last) {
    throw Error(ErrorCode::NotConverged, "series too short for a halving residual");
  }
  return half;
}

}  // namespace

Matrix limiting_matrix_estimate(const StretchFactor& m, double t) {
  if (!(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "t must be positive");
  return limiting_from_svd(m.svd(), t);
}

LyapunovData lyapunov_from_propagation(const PropagationResult& series, const LyapunovOptions& options) {
  const FlowSample& last = series.back();
  const FlowSample& half = half_sample(series);
  const LogSvd svd = last.stretch.svd();
  LyapunovData out;
  out.horizon = last.t;
  const Eigen::Index n = svd.log_sigma.size();
  out.exponents.resize(static_cast<size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) out.exponents[static_cast<size_t>(i)] = svd.log_sigma(i) / last.t;
  out.basis = svd.left.transpose();
  out.residual = max_abs(limiting_from_svd(svd, last.t) - limiting_matrix_estimate(half.stretch, half.t));
  out.threshold = options.threshold_factor * (1.0 + std::abs(out.exponents.front()));
  out.converged = out.residual <= out.threshold;
  out.clusters = make_clusters(out.exponents, std::max(options.cluster_gap, out.residual));
  return out;
}

LyapunovData lyapunov_spectrum(const QuadraticHamiltonian& hamiltonian, double t_star, double dt,
                               const LyapunovOptions& options) {
  PropagationOptions popts;
  popts.samples = 2;
  LyapunovData data = lyapunov_from_propagation(propagate(hamiltonian, t_star, dt, popts), options);
  if (options.require_convergence && !data.converged) {
    std::ostringstream os;
    os << "residual " << data.residual << " above " << data.threshold << " at t*=" << data.horizon
       << "; raise t_star";
    throw Error(ErrorCode::NotConverged, os.str());
  }
  return data;
}

ExponentEstimate vector_exponent(const PropagationResult& series, const Vector& ell, double threshold) {
  const double norm = ell.norm();
  if (!(norm > 0.0)) throw Error(ErrorCode::InvalidArgument, "ell must be non-zero");
  const FlowSample& last = series.back();
  const FlowSample& half = half_sample(series);
  const double at_last = (last.stretch.log_norm_transpose_times(ell) - std::log(norm)) / last.t;
  const double at_half = (half.stretch.log_norm_transpose_times(ell) - std::log(norm)) / half.t;
  ExponentEstimate e{at_last, std::abs(at_last - at_half)};
  if (threshold > 0.0 && e.residual > threshold) {
    std::ostringstream os;
    os << "vector exponent residual " << e.residual << " above " << threshold;
    throw Error(ErrorCode::NotConverged, os.str());
  }
  return e;
}

RegularityVerdict regularity_check(const LyapunovData& data, double tol) {
  RegularityVerdict v;
  const size_t n = data.exponents.size();
  for (size_t k = 0; k < n; ++k) {
    v.max_violation = std::max(v.max_violation, std::abs(data.exponents[k] + data.exponents[n - 1 - k]));
  }
  v.regular = v.max_violation <= tol;
  return v;
}

namespace {

std::vector<double> exponents_of(const StretchFactor& f, double t) {
  const LogSvd svd = f.svd();
  std::vector<double> out(static_cast<size_t>(svd.log_sigma.size()));
  for (Eigen::Index i = 0; i < svd.log_sigma.size(); ++i) out[static_cast<size_t>(i)] = svd.log_sigma(i) / t;
  return out;
}

std::vector<double> exponents_of(const Matrix& m, double t) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const Vector s = svd.singularValues();
  if (!(s(s.size() - 1) > 0.0) || !s.allFinite()) throw Error(ErrorCode::SingularM, "matrix singular or overflowed");
  std::vector<double> out(static_cast<size_t>(s.size()));
  for (Eigen::Index i = 0; i < s.size(); ++i) out[static_cast<size_t>(i)] = std::log(s(i)) / t;
  return out;
}

}  // namespace

PolarSpectra polar_factor_exponents(const PropagationResult& series, const LyapunovOptions& options) {
  const LyapunovData data = lyapunov_from_propagation(series, options);
  if (options.require_convergence && !data.converged) {
    std::ostringstream os;
    os << "series not converged (residual " << data.residual << ")";
    throw Error(ErrorCode::NotConverged, os.str());
  }
  const FlowSample& last = series.back();
  PolarSpectra out;
  out.residual = data.residual;
  out.of_m = data.exponents;
  const LogSvd svd = last.stretch.svd();
  if (last.dense && svd.log_sigma(0) < 12.0) {
    // Dense route while M is well enough conditioned for it: explicit polar
    // factors and their own SVDs.
    const PolarPair pp = polar_decompose(*last.dense);
    Eigen::SelfAdjointEigenSolver<Matrix> es(pp.t_part);
    const Vector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Matrix sqrt_t = es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
    out.of_t = exponents_of(pp.t_part, last.t);
    out.of_sqrt_t = exponents_of(sqrt_t, last.t);
    out.dense_route = true;
  } else {
    // Same log-SVD as the exponents of M, so the comparison is an identity here.
    out.of_t = exponents_of(polar_power(svd, 1.0), last.t);
    out.of_sqrt_t = exponents_of(polar_power(svd, 0.5), last.t);
  }
  for (size_t i = 0; i < out.of_m.size(); ++i) {
    out.deviation_t = std::max(out.deviation_t, std::abs(out.of_t[i] - out.of_m[i]));
    out.deviation_sqrt_t = std::max(out.deviation_sqrt_t, std::abs(out.of_sqrt_t[i] - 0.5 * out.of_m[i]));
  }
  const double allowed = 2.0 * out.residual + 1e-9;
  out.consistent = out.deviation_t <= allowed && out.deviation_sqrt_t <= allowed;
  return out;
}

}  // namespace quadent
