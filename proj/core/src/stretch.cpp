#include "quadent/stretch.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace quadent {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_max_abs(const Eigen::Ref<const Vector>& v) {
  const double m = v.cwiseAbs().maxCoeff();
  return m > 0.0 ? std::log(m) : kNegInf;
}

struct ThinQr {
  Matrix q;  // n x k, orthonormal columns
  Matrix r;  // k x k, upper triangular
};

// Householder QR that rescales every tail before forming its norm. Graded
// columns reach e^-400 and beyond, where squared entries underflow.
ThinQr graded_qr(Matrix a) {
  const Eigen::Index n = a.rows();
  const Eigen::Index k = a.cols();
  std::vector<Vector> reflectors;
  std::vector<double> betas;
  for (Eigen::Index j = 0; j < k; ++j) {
    const Eigen::Index len = n - j;
    Vector x = a.col(j).tail(len);
    const double scale = x.cwiseAbs().maxCoeff();
    Vector v = Vector::Zero(len);
    double beta = 0.0;
    if (scale > 0.0) {
      v = x / scale;
      const double alpha = (v(0) >= 0.0 ? -1.0 : 1.0) * v.norm();
      v(0) -= alpha;
      const double vv = v.squaredNorm();
      if (vv > 0.0) {
        beta = 2.0 / vv;
        for (Eigen::Index c = j; c < k; ++c) {
          const double d = beta * v.dot(a.col(c).tail(len));
          a.col(c).tail(len) -= d * v;
        }
      }
    }
    reflectors.push_back(std::move(v));
    betas.push_back(beta);
  }
  ThinQr out;
  out.r = a.topRows(k).triangularView<Eigen::Upper>();
  out.q = Matrix::Identity(n, k);
  for (Eigen::Index j = k - 1; j >= 0; --j) {
    const Vector& v = reflectors[static_cast<size_t>(j)];
    const double beta = betas[static_cast<size_t>(j)];
    if (beta == 0.0) continue;
    for (Eigen::Index c = 0; c < k; ++c) {
      const double d = beta * v.dot(out.q.col(c).tail(n - j));
      out.q.col(c).tail(n - j) -= d * v;
    }
  }
  return out;
}

}  // namespace

double ScaledFactor::log_det() const {
  return 2.0 * (dimension() * log_scale + factor.diagonal().cwiseAbs().array().log().sum());
}

std::vector<double> ScaledFactor::log_symplectic_spectrum() const {
  const int n = modes();
  const Matrix omega = standard_omega(n);
  // The SVD of F^T Omega F only resolves values within ~e^18 of the largest; the
  // inverse F^-1 Omega F^-T resolves those near the smallest. Anything in neither
  // range is fixed by sum(log nu) = log det F.
  constexpr double kResolved = 18.0;
  Eigen::JacobiSVD<Matrix> direct(factor.transpose() * omega * factor);
  const Matrix inv = factor.triangularView<Eigen::Lower>().solve(Matrix::Identity(2 * n, 2 * n));
  Eigen::JacobiSVD<Matrix> inverse(inv * omega * inv.transpose());
  const Vector s = direct.singularValues();
  const Vector si = inverse.singularValues();
  std::vector<double> from_top(static_cast<size_t>(n));
  std::vector<double> from_bottom(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) {
    from_top[static_cast<size_t>(k)] = 0.5 * (std::log(s(2 * k)) + std::log(s(2 * k + 1)));
    const int j = n - 1 - k;
    from_bottom[static_cast<size_t>(k)] = -0.5 * (std::log(si(2 * j)) + std::log(si(2 * j + 1)));
  }
  const double top = from_top.front();
  const double bottom = from_bottom.back();
  double total = 0.0;
  for (int i = 0; i < 2 * n; ++i) total += std::log(factor(i, i));
  std::vector<double> out(static_cast<size_t>(n));
  std::vector<size_t> unresolved;
  double resolved_sum = 0.0;
  for (size_t k = 0; k < out.size(); ++k) {
    if (top - from_top[k] <= kResolved) {
      out[k] = from_top[k];
    } else if (from_bottom[k] - bottom <= kResolved) {
      out[k] = from_bottom[k];
    } else {
      unresolved.push_back(k);
      continue;
    }
    resolved_sum += out[k];
  }
  // Middle values all exceed e^18, so only their sum matters for entropies.
  for (size_t k : unresolved) out[k] = (total - resolved_sum) / static_cast<double>(unresolved.size());
  std::sort(out.begin(), out.end(), std::greater<>());
  for (double& v : out) v += 2.0 * log_scale;
  return out;
}

SpdMatrix ScaledFactor::to_spd() const { return SpdMatrix::from_cholesky(std::exp(log_scale) * factor); }

ScaledFactor ScaledFactor::of(const SpdMatrix& g) { return ScaledFactor{g.cholesky(), 0.0}; }

StretchFactor StretchFactor::identity(int dimension) {
  StretchFactor f;
  f.basis_ = Matrix::Identity(dimension, dimension);
  f.log_scales_ = Vector::Zero(dimension);
  f.rows_ = Matrix::Identity(dimension, dimension);
  return f;
}

StretchFactor StretchFactor::from_dense(const Matrix& m) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::DimensionMismatch, "stretch factor needs a square matrix");
  StretchFactor f = identity(static_cast<int>(m.rows()));
  f.left_multiply(m);
  return f;
}

StretchFactor StretchFactor::symmetric(Matrix basis, Vector log_scales) {
  StretchFactor f;
  f.rows_ = basis.transpose();
  f.basis_ = std::move(basis);
  f.log_scales_ = std::move(log_scales);
  return f;
}

void StretchFactor::left_multiply(const Matrix& e) {
  const Eigen::Index n = basis_.rows();
  if (e.rows() != n || e.cols() != n) throw Error(ErrorCode::DimensionMismatch, "step matrix size");
  Eigen::HouseholderQR<Matrix> qr(e * basis_);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  Matrix next_rows(n, n);
  Vector next_scales(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double lead = kNegInf;
    for (Eigen::Index k = i; k < n; ++k) {
      if (r(i, k) != 0.0) lead = std::max(lead, log_scales_(k) + std::log(std::abs(r(i, k))));
    }
    if (lead == kNegInf) throw Error(ErrorCode::SingularM, "step produced a singular product");
    Vector w = Vector::Zero(n);
    for (Eigen::Index k = i; k < n; ++k) {
      if (r(i, k) != 0.0) w += r(i, k) * std::exp(log_scales_(k) - lead) * rows_.row(k).transpose();
    }
    const double top = w.cwiseAbs().maxCoeff();
    if (!(top > 0.0)) throw Error(ErrorCode::SingularM, "step produced a singular product");
    next_rows.row(i) = (w / top).transpose();
    next_scales(i) = lead + std::log(top);
  }
  basis_ = qr.householderQ();
  rows_ = std::move(next_rows);
  log_scales_ = std::move(next_scales);
}

double StretchFactor::max_log_scale() const { return log_scales_.maxCoeff(); }

Matrix StretchFactor::dense() const {
  return basis_ * log_scales_.array().exp().matrix().asDiagonal() * rows_;
}

double StretchFactor::relative_symplectic_defect() const {
  const int n = dimension() / 2;
  const double top = max_log_scale();
  const Vector scaled = (log_scales_.array() - top).exp();
  const Matrix b = scaled.asDiagonal() * rows_;
  const Matrix m_hat = basis_ * b;
  const Matrix omega = standard_omega(n);
  const double shrink = std::exp(-2.0 * top);
  const Matrix z = m_hat * omega * m_hat.transpose() - shrink * omega;
  const double norm_hat = m_hat.cwiseAbs().rowwise().sum().maxCoeff();
  return max_abs(z) / (shrink + norm_hat * norm_hat);
}

LogSvd StretchFactor::svd() const {
  // Rows of B = diag(e^s) R are orthogonalized by plane rotations J; then
  // M = Q B = (Q J^T) diag(row norms) V^T.
  const Eigen::Index n = basis_.rows();
  Matrix rows = rows_;
  Vector scales = log_scales_;
  Matrix rot = Matrix::Identity(n, n);  // accumulates J
  for (int sweep = 0; sweep < 60; ++sweep) {
    bool rotated = false;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        Eigen::Index i = p, j = q;
        if (scales(j) > scales(i)) std::swap(i, j);  // row i carries the larger scale
        const double ni = rows.row(i).squaredNorm();
        const double nj = rows.row(j).squaredNorm();
        const double x = rows.row(i).dot(rows.row(j));
        if (x == 0.0 || std::abs(x) <= 1e-15 * std::sqrt(ni * nj)) continue;
        const double rho = std::exp(scales(j) - scales(i));
        // Classic one-sided Jacobi in units of e^{2 s_i}; zeta scaled by rho.
        const double rho_zeta = (rho * rho * nj - ni) / (2.0 * x);
        const double sign = rho_zeta >= 0.0 ? 1.0 : -1.0;
        const double t_over_rho = sign / (std::abs(rho_zeta) + std::sqrt(rho * rho + rho_zeta * rho_zeta));
        const double t = t_over_rho * rho;
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const Vector ri = rows.row(i).transpose();
        const Vector rj = rows.row(j).transpose();
        // b_i' = c b_i - s b_j,  b_j' = s b_i + c b_j  with s = c t
        Vector new_i = c * ri - c * t * rho * rj;
        Vector new_j = c * t_over_rho * ri + c * rj;
        const double li = log_max_abs(new_i);
        const double lj = log_max_abs(new_j);
        if (li == kNegInf || lj == kNegInf) throw Error(ErrorCode::SingularM, "rank loss in Jacobi sweep");
        rows.row(i) = (new_i / std::exp(li)).transpose();
        rows.row(j) = (new_j / std::exp(lj)).transpose();
        scales(i) += li;
        scales(j) += lj;
        const Vector gi = rot.row(i).transpose();
        const Vector gj = rot.row(j).transpose();
        rot.row(i) = (c * gi - c * t * gj).transpose();
        rot.row(j) = (c * t * gi + c * gj).transpose();
        rotated = true;
      }
    }
    if (!rotated) break;
  }
  std::vector<Eigen::Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Vector log_sigma(n);
  for (Eigen::Index i = 0; i < n; ++i) log_sigma(i) = scales(i) + std::log(rows.row(i).norm());
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return log_sigma(a) > log_sigma(b); });
  const Matrix left_all = basis_ * rot.transpose();
  LogSvd out;
  out.left.resize(n, n);
  out.right.resize(n, n);
  out.log_sigma.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index i = order[static_cast<size_t>(k)];
    out.left.col(k) = left_all.col(i);
    out.right.col(k) = rows.row(i).transpose().normalized();
    out.log_sigma(k) = log_sigma(i);
  }
  return out;
}

ScaledFactor StretchFactor::gram_factor(const Matrix& selector, const Matrix& right) const {
  const Eigen::Index n = basis_.rows();
  if (selector.cols() != n || right.rows() != n) {
    throw Error(ErrorCode::DimensionMismatch, "gram_factor operand sizes");
  }
  const Eigen::Index k = selector.rows();
  // Row-graded (diag(e^s) P^T), rows sorted by decreasing scale.
  const Matrix p = selector * basis_;
  std::vector<Eigen::Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return log_scales_(a) > log_scales_(b); });
  const double top = max_log_scale();
  Matrix graded(n, k);
  Matrix e(n, right.cols());
  const Matrix rw = rows_ * right;
  for (Eigen::Index r = 0; r < n; ++r) {
    const Eigen::Index i = order[static_cast<size_t>(r)];
    graded.row(r) = std::exp(log_scales_(i) - top) * p.col(i).transpose();
    e.row(r) = rw.row(i);
  }
  const ThinQr qr = graded_qr(graded);
  const Matrix& rt = qr.r;
  const Matrix h_half = qr.q.transpose() * e;
  Eigen::LLT<Matrix> llt(h_half * h_half.transpose());
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::NotPositiveDefinite, "restricted Gram factor lost rank (scale range beyond e^700?)");
  }
  Matrix lower = rt.transpose() * Matrix(llt.matrixL());
  for (Eigen::Index i = 0; i < k; ++i) {
    if (lower(i, i) < 0.0) lower.col(i) *= -1.0;
    if (!(lower(i, i) > 0.0)) {
      throw Error(ErrorCode::NotPositiveDefinite, "restricted Gram factor lost rank (scale range beyond e^700?)");
    }
  }
  return ScaledFactor{std::move(lower), top};
}

double StretchFactor::log_norm_transpose_times(const Vector& ell) const {
  const Vector y = basis_.transpose() * ell;
  double lead = kNegInf;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y(i) != 0.0) lead = std::max(lead, log_scales_(i) + std::log(std::abs(y(i))));
  }
  if (lead == kNegInf) return kNegInf;
  Vector v = Vector::Zero(rows_.cols());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y(i) != 0.0) v += y(i) * std::exp(log_scales_(i) - lead) * rows_.row(i).transpose();
  }
  return lead + std::log(v.norm());
}

StretchFactor polar_power(const LogSvd& svd_of_m, double alpha) {
  return StretchFactor::symmetric(svd_of_m.left, alpha * svd_of_m.log_sigma);
}

}  // namespace quadent
