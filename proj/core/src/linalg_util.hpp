#pragma once

#include <Eigen/Dense>

namespace quadent::detail {

/// Lower-triangular factor C with C C^T = A A^T for a wide A (rows <= cols),
/// taken from the QR factorization of A^T so A A^T is never formed.
inline Eigen::MatrixXd gram_factor(const Eigen::MatrixXd& wide) {
  const Eigen::Index k = wide.rows();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(wide.transpose());
  Eigen::MatrixXd r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < k; ++i) {
    if (r(i, i) < 0.0) r.row(i) *= -1.0;
  }
  return r.transpose();
}

/// Cholesky factor of F L L^T F^T.
inline Eigen::MatrixXd restricted_factor(const Eigen::MatrixXd& selector,
                                         const Eigen::MatrixXd& lower) {
  return gram_factor(selector * lower);
}

}  // namespace quadent::detail
