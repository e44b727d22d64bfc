#include "quadent/ssa_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "linalg_util.hpp"
#include "minimize.hpp"

namespace quadent {

std::string to_string(BoundStatus s) {
  switch (s) {
    case BoundStatus::Converged: return "converged";
    case BoundStatus::BudgetExhausted: return "budget_exhausted";
    case BoundStatus::Diverging: return "diverging";
  }
  return "unknown";
}

SubsystemFamily SubsystemFamily::make(std::vector<FamilyMember> members, double tol) {
  if (members.empty()) throw Error(ErrorCode::InvalidArgument, "empty subsystem family");
  const Eigen::Index width = members.front().selector.cols();
  if (width % 2 != 0 || width == 0) throw Error(ErrorCode::DimensionMismatch, "selector width must be 2N");
  double scaled = 0.0;
  for (const auto& mem : members) {
    if (mem.selector.cols() != width) throw Error(ErrorCode::DimensionMismatch, "family selectors differ in width");
    if (!(mem.weight >= 0.0)) throw Error(ErrorCode::InvalidArgument, "weights must be nonnegative");
    const double norm = mem.selector.cwiseAbs().rowwise().sum().maxCoeff();
    const double defect = symplectic_defect(mem.selector);
    if (defect > tol * (1.0 + norm * norm)) {
      std::ostringstream os;
      os << "family member violates F Omega F^T = Omega by " << defect;
      throw Error(ErrorCode::NotDarboux, os.str());
    }
    scaled += mem.weight * static_cast<double>(mem.selector.rows() / 2);
  }
  const double n = static_cast<double>(width / 2);
  if (std::abs(scaled - n) > tol * n) {
    std::ostringstream os;
    os << "scaling condition sum p_i N_i = N fails: " << scaled << " vs " << n;
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
  SubsystemFamily f;
  f.members_ = std::move(members);
  f.n_modes_ = static_cast<int>(width / 2);
  return f;
}

SubsystemFamily SubsystemFamily::mutual_information_pair(const Matrix& m, const ModeCount& split) {
  if (m.rows() != 2 * split.total() || m.cols() != m.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "M does not match the split");
  }
  const Matrix fa = SubsystemSpec::first(split).selector();
  const Matrix fb = SubsystemSpec::second(split).selector();
  return make({{fa, 0.5}, {fb, 0.5}, {fa * m, 0.5}, {fb * m, 0.5}}, 1e-10);
}

SubsystemFamily SubsystemFamily::full_system(int n_modes) {
  return make({{Matrix::Identity(2 * n_modes, 2 * n_modes), 1.0}});
}

namespace {

void require_family_size(const SpdMatrix& g, const SubsystemFamily& family) {
  if (g.modes() != family.modes()) throw Error(ErrorCode::DimensionMismatch, "G and family sizes differ");
}

double member_log_det(const Matrix& selector, const Matrix& lower) {
  const Matrix c = detail::restricted_factor(selector, lower);
  return 2.0 * c.diagonal().cwiseAbs().array().log().sum();
}

}  // namespace

double gss_objective(const SpdMatrix& g, const SubsystemFamily& family) {
  require_family_size(g, family);
  double value = asymptotic_entropy(g);
  for (const auto& mem : family.members()) {
    const int k = static_cast<int>(mem.selector.rows() / 2);
    value -= mem.weight * (0.5 * member_log_det(mem.selector, g.cholesky()) + k * kLnHalfE);
  }
  return value;
}

double stationarity_residual(const SpdMatrix& g, const SubsystemFamily& family) {
  require_family_size(g, family);
  const Matrix ginv = g.inverse();
  Matrix sum = Matrix::Zero(ginv.rows(), ginv.cols());
  for (const auto& mem : family.members()) {
    const Matrix lower = detail::restricted_factor(mem.selector, g.cholesky());
    const Matrix w = lower.triangularView<Eigen::Lower>().solve(mem.selector);
    sum += mem.weight * w.transpose() * w;
  }
  return max_abs(ginv - sum) / max_abs(ginv);
}

namespace {

struct RhsEvaluator {
  Matrix m;
  Matrix fa;
  Matrix fb;
  double log_det_m = 0.0;

  double operator()(const Matrix& lower) const {
    const double ld_g = 2.0 * lower.diagonal().cwiseAbs().array().log().sum();
    const Matrix ml = m * lower;
    const double i_g = 0.5 * (member_log_det(fa, lower) + member_log_det(fb, lower) - ld_g);
    const double i_mg = 0.5 * (member_log_det(fa, ml) + member_log_det(fb, ml) - ld_g - 2.0 * log_det_m);
    return i_g + i_mg;
  }
};

RhsEvaluator make_evaluator(const Matrix& m, const ModeCount& split) {
  if (m.rows() != 2 * split.total() || m.cols() != m.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "M does not match the split");
  }
  RhsEvaluator ev;
  ev.m = m;
  ev.fa = SubsystemSpec::first(split).selector();
  ev.fb = SubsystemSpec::second(split).selector();
  Eigen::PartialPivLU<Matrix> lu(m);
  const double det = lu.determinant();
  if (!(std::abs(det) > 0.0)) throw Error(ErrorCode::SingularM, "M is singular");
  ev.log_det_m = std::log(std::abs(det));
  return ev;
}

// Parameters: log of the diagonal of C, then the strict lower triangle by columns.
Eigen::VectorXd pack(const Matrix& lower) {
  const Eigen::Index n = lower.rows();
  Eigen::VectorXd x(n * (n + 1) / 2);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) x(k++) = std::log(lower(i, i));
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 1; i < n; ++i) x(k++) = lower(i, j);
  }
  return x;
}

Matrix unpack(const Eigen::VectorXd& x, Eigen::Index n) {
  Matrix lower = Matrix::Zero(n, n);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) lower(i, i) = std::exp(x(k++));
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 1; i < n; ++i) lower(i, j) = x(k++);
  }
  return lower;
}

bool is_symmetric_pd(const Matrix& m) {
  if (max_abs(m - m.transpose()) > 1e-10 * std::max(1.0, max_abs(m))) return false;
  Eigen::LLT<Matrix> llt(0.5 * (m + m.transpose()));
  return llt.info() == Eigen::Success;
}

}  // namespace

double gss_rhs(const SpdMatrix& g, const Matrix& m, const ModeCount& split) {
  return make_evaluator(m, split)(g.cholesky());
}

BoundReport gss_rhs_minimize(const Matrix& m, const ModeCount& split, const MinimizeBudget& budget) {
  const RhsEvaluator ev = make_evaluator(m, split);
  const Eigen::Index n = m.rows();
  const double kInf = std::numeric_limits<double>::infinity();

  std::vector<std::pair<std::string, Matrix>> starts;
  starts.emplace_back("identity", Matrix::Identity(n, n));
  if (budget.informed_starts) {
    if (is_symmetric_pd(m)) starts.emplace_back("inverse_m", Matrix(m.inverse()));
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU);
    const Matrix& u = svd.matrixU();
    starts.emplace_back("inverse_sqrt_mmt",
                        Matrix(u * svd.singularValues().cwiseInverse().asDiagonal() * u.transpose()));
  }

  detail::BfgsOptions opts;
  opts.max_iterations = budget.max_iterations;
  opts.max_evaluations = budget.max_evaluations;
  opts.gradient_tol = budget.gradient_tol;
  opts.fd_step = budget.fd_step;

  auto objective = [&](const Eigen::VectorXd& x) {
    const Matrix lower = unpack(x, n);
    if (!lower.allFinite()) return kInf;
    return ev(lower);
  };

  BoundReport best;
  best.value = kInf;
  int total_iterations = 0;
  bool exhausted = false;
  for (const auto& [name, g0] : starts) {
    Eigen::LLT<Matrix> llt(0.5 * (g0 + g0.transpose()));
    if (llt.info() != Eigen::Success) continue;
    const detail::BfgsResult r = detail::bfgs_minimize(objective, pack(llt.matrixL()), opts);
    total_iterations += r.iterations;
    if (r.value < best.value) {
      best.value = r.value;
      best.argmin_g = unpack(r.x, n) * unpack(r.x, n).transpose();
      best.trace = r.trace;
      best.start = name;
      exhausted = r.budget_exhausted;
    }
  }
  if (!best.argmin_g) throw Error(ErrorCode::NotPositiveDefinite, "no valid starting point");
  best.iterations = total_iterations;
  Eigen::SelfAdjointEigenSolver<Matrix> es(*best.argmin_g);
  best.argmin_condition = es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff();
  const SpdMatrix g(*best.argmin_g, 1e-9);
  best.residual = stationarity_residual(g, SubsystemFamily::mutual_information_pair(m, split));
  if (!(best.argmin_condition < budget.divergence_condition)) {
    best.status = BoundStatus::Diverging;
  } else if (exhausted) {
    best.status = BoundStatus::BudgetExhausted;
  } else {
    best.status = BoundStatus::Converged;
  }
  return best;
}

double operator_norm(const CovarianceMatrix& g0) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(g0.matrix(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

double restricted_asymptotic_entropy(const Matrix& eigvecs, const Vector& log_eigs, const SubsystemSpec& sub) {
  const StretchFactor half = StretchFactor::symmetric(eigvecs, 0.5 * log_eigs);
  const ScaledFactor c = half.gram_factor(sub.selector(), Matrix::Identity(eigvecs.rows(), eigvecs.rows()));
  return 0.5 * c.log_det() + sub.modes() * kLnHalfE;
}

LogSvd spectral_form(const Matrix& pd) {
  if (!is_symmetric_pd(pd)) throw Error(ErrorCode::NotPositiveDefinite, "expected a symmetric PD matrix");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (pd + pd.transpose()));
  const Eigen::Index n = pd.rows();
  LogSvd out;
  out.left.resize(n, n);
  out.log_sigma.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.left.col(k) = es.eigenvectors().col(n - 1 - k);
    out.log_sigma(k) = std::log(es.eigenvalues()(n - 1 - k));
  }
  out.right = out.left;
  return out;
}

namespace {

void check_split(const LogSvd& svd, const CovarianceMatrix& g0, const ModeCount& split) {
  if (svd.left.rows() != 2 * split.total() || g0.modes() != split.total()) {
    throw Error(ErrorCode::DimensionMismatch, "T, G0 and split sizes differ");
  }
}

}  // namespace

double pure_state_growth_lower_bound(const LogSvd& m_svd, const CovarianceMatrix& g0, const ModeCount& split) {
  check_split(m_svd, g0, split);
  const double sa = restricted_asymptotic_entropy(m_svd.left, m_svd.log_sigma, SubsystemSpec::first(split));
  const double sb = restricted_asymptotic_entropy(m_svd.left, m_svd.log_sigma, SubsystemSpec::second(split));
  return sa + sb - split.total() * kLnHalfE - split.a() * (kLnHalfE + std::log(operator_norm(g0)));
}

double pure_state_growth_lower_bound(const Matrix& t, const CovarianceMatrix& g0, const ModeCount& split) {
  return pure_state_growth_lower_bound(spectral_form(t), g0, split);
}

SquashedBounds squashed_bounds(const LogSvd& m_svd, const CovarianceMatrix& g0, const ModeCount& split) {
  check_split(m_svd, g0, split);
  const auto a = SubsystemSpec::first(split);
  const auto b = SubsystemSpec::second(split);
  const double ln_norm = std::log(operator_norm(g0));
  const double n = split.total();
  const Vector twice = 2.0 * m_svd.log_sigma;
  SquashedBounds out;
  out.lower = restricted_asymptotic_entropy(m_svd.left, m_svd.log_sigma, a) +
              restricted_asymptotic_entropy(m_svd.left, m_svd.log_sigma, b) - 2.0 * n * kLnHalfE - n * ln_norm;
  out.upper = 0.5 * restricted_asymptotic_entropy(m_svd.left, twice, a) +
              0.5 * restricted_asymptotic_entropy(m_svd.left, twice, b) + 0.5 * n * ln_norm;
  if (out.lower > out.upper + 1e-9 * (1.0 + std::abs(out.upper))) {
    std::ostringstream os;
    os << "squashed bounds out of order: lower " << out.lower << " > upper " << out.upper;
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
  return out;
}

SquashedBounds squashed_bounds(const Matrix& t, const CovarianceMatrix& g0, const ModeCount& split) {
  return squashed_bounds(spectral_form(t), g0, split);
}

}  // namespace quadent
