#include "quadent/subsystem_exponent.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace quadent {

std::string to_string(ExponentMethod m) {
  switch (m) {
    case ExponentMethod::Algebraic: return "algebraic";
    case ExponentMethod::Volumetric: return "volumetric";
    case ExponentMethod::Generic: return "generic";
  }
  return "unknown";
}

Matrix darboux_rows(const SubsystemSpec& sub, double tol) {
  const double defect = symplectic_defect(sub.selector());
  if (defect > tol) {
    std::ostringstream os;
    os << "subsystem rows violate theta Omega theta^T = Omega by " << defect;
    throw Error(ErrorCode::NotDarboux, os.str());
  }
  return sub.selector();
}

Matrix expansion_matrix(const Matrix& theta, const LyapunovData& lyap) {
  if (theta.cols() != lyap.basis.cols()) throw Error(ErrorCode::DimensionMismatch, "theta width vs basis");
  return theta * lyap.basis.transpose();
}

namespace {

[[noreturn]] void rank_deficient(const ColumnSelection& sel, Eigen::Index needed) {
  std::ostringstream os;
  os << "only " << sel.indices.size() << " of " << needed << " independent columns; margins:";
  for (double m : sel.margins) os << ' ' << m;
  throw Error(ErrorCode::RankDeficient, os.str());
}

}  // namespace

ColumnSelection select_columns(const Matrix& f, double tol_rel) {
  const Eigen::Index need = f.rows();
  ColumnSelection sel;
  Matrix q(f.rows(), 0);  // orthonormal basis of kept columns
  for (Eigen::Index j = 0; j < f.cols() && static_cast<Eigen::Index>(sel.indices.size()) < need; ++j) {
    const Vector col = f.col(j);
    const double norm = col.norm();
    if (norm == 0.0) continue;
    Vector r = col;
    for (int pass = 0; pass < 2; ++pass) r -= q * (q.transpose() * r);
    const double margin = r.norm() / norm;
    if (margin > tol_rel) {
      q.conservativeResize(Eigen::NoChange, q.cols() + 1);
      q.col(q.cols() - 1) = r / r.norm();
      sel.indices.push_back(static_cast<int>(j));
      sel.margins.push_back(margin);
    }
  }
  if (static_cast<Eigen::Index>(sel.indices.size()) < need) rank_deficient(sel, need);
  return sel;
}

ColumnSelection select_columns(const Matrix& f, const std::vector<ExponentCluster>& clusters, double tol_rel) {
  const Eigen::Index need = f.rows();
  ColumnSelection sel;
  Matrix q(f.rows(), 0);
  for (const auto& c : clusters) {
    if (static_cast<Eigen::Index>(sel.indices.size()) >= need) break;
    const Matrix block = f.middleCols(c.first, c.size);
    const double scale = block.colwise().norm().maxCoeff();
    if (scale == 0.0) continue;
    Matrix r = block;
    for (int pass = 0; pass < 2; ++pass) r -= q * (q.transpose() * r);
    Eigen::JacobiSVD<Matrix> svd(r, Eigen::ComputeThinU);
    const Vector s = svd.singularValues();
    int gained = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      if (s(i) / scale > tol_rel && static_cast<Eigen::Index>(sel.indices.size()) + gained < need) ++gained;
    }
    for (int g = 0; g < gained; ++g) {
      sel.indices.push_back(c.first + g);
      sel.margins.push_back(s(g) / scale);
    }
    if (gained > 0) {
      const Eigen::Index old = q.cols();
      q.conservativeResize(Eigen::NoChange, old + gained);
      q.rightCols(gained) = svd.matrixU().leftCols(gained);
    }
  }
  if (static_cast<Eigen::Index>(sel.indices.size()) < need) rank_deficient(sel, need);
  return sel;
}

ExponentReport subsystem_exponent_algebraic(const SubsystemSpec& sub, const LyapunovData& lyap, double tol_rel) {
  const Matrix theta = darboux_rows(sub);
  const Matrix f = expansion_matrix(theta, lyap);
  const ColumnSelection sel = select_columns(f, lyap.clusters, std::max(tol_rel, lyap.residual));
  ExponentReport rep;
  rep.method = ExponentMethod::Algebraic;
  rep.indices = sel.indices;
  rep.margins = sel.margins;
  for (int i : sel.indices) rep.lambda_a += lyap.exponents[static_cast<size_t>(i)];
  for (Eigen::Index k = 0; k < theta.rows(); ++k) rep.generic_sum += lyap.exponents[static_cast<size_t>(k)];
  rep.generic_agrees = std::abs(rep.generic_sum - rep.lambda_a) <= std::max(1e-9, 2.0 * lyap.residual);
  return rep;
}

double restricted_log_volume(const SubsystemSpec& sub, const StretchFactor& m, const CovarianceMatrix& g0) {
  return 0.5 * m.gram_factor(sub.selector(), g0.spd().cholesky()).log_det();
}

ExponentReport subsystem_exponent_volumetric(const SubsystemSpec& sub, const PropagationResult& series,
                                             const CovarianceMatrix& g0, double window_start) {
  if (sub.total_modes() != series.modes() || g0.modes() != series.modes()) {
    throw Error(ErrorCode::DimensionMismatch, "subsystem, series and G0 disagree on N");
  }
  const double t_end = series.back().t;
  std::vector<double> ts, vs;
  for (const auto& s : series.samples()) {
    if (s.t >= window_start * t_end - 1e-12 * t_end) {
      ts.push_back(s.t);
      vs.push_back(restricted_log_volume(sub, s.stretch, g0));
    }
  }
  if (ts.size() < 3) throw Error(ErrorCode::NotConverged, "fewer than three samples in the slope window");
  ExponentReport rep;
  rep.method = ExponentMethod::Volumetric;
  rep.fit = fit_line(ts, vs);
  rep.lambda_a = rep.fit.slope;
  rep.slope_stderr = rep.fit.slope_stderr;
  return rep;
}

ExponentReport subsystem_exponent_volumetric(const SubsystemSpec& sub, const QuadraticHamiltonian& hamiltonian,
                                             double t_star, double dt, const CovarianceMatrix& g0) {
  PropagationOptions opts;
  opts.samples = 40;
  return subsystem_exponent_volumetric(sub, propagate(hamiltonian, t_star, dt, opts), g0, 0.5);
}

}  // namespace quadent
