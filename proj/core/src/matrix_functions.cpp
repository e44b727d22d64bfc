#include "quadent/matrix_functions.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <sstream>

namespace quadent {

Matrix expm(const Matrix& a) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::DimensionMismatch, "expm needs a square matrix");
  return a.exp();
}

namespace {

void require_principal_branch(const Matrix& a) {
  Eigen::EigenSolver<Matrix> es(a, false);
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const auto mu = es.eigenvalues()(i);
    if (std::abs(mu) <= 1e-14 * scale) throw Error(ErrorCode::SingularM, "matrix has a zero eigenvalue");
    if (mu.real() < 0.0 && std::abs(mu.imag()) <= 1e-10 * std::abs(mu)) {
      std::ostringstream os;
      os << "negative real eigenvalue " << mu.real() << "; no real principal logarithm";
      throw Error(ErrorCode::NoRealLogarithm, os.str());
    }
  }
}

Matrix db_sqrt(const Matrix& a) {
  const Eigen::Index n = a.rows();
  Matrix y = a;
  Matrix z = Matrix::Identity(n, n);
  bool scaling = true;
  for (int it = 0; it < 100; ++it) {
    Eigen::PartialPivLU<Matrix> ly(y), lz(z);
    if (scaling) {
      const double g = std::pow(std::abs(ly.determinant() * lz.determinant()), -1.0 / (2.0 * n));
      if (std::isfinite(g) && g > 0.0) {
        y *= g;
        z *= g;
        ly.compute(y);
        lz.compute(z);
      }
    }
    const Matrix y_next = 0.5 * (y + lz.inverse());
    const Matrix z_next = 0.5 * (z + ly.inverse());
    const double change = (y_next - y).cwiseAbs().maxCoeff() / std::max(1e-300, y_next.cwiseAbs().maxCoeff());
    y = y_next;
    z = z_next;
    if (change < 1e-2) scaling = false;
    if (change < 1e-15) break;
  }
  return y;
}

}  // namespace

Matrix sqrtm_real(const Matrix& a) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::DimensionMismatch, "sqrtm needs a square matrix");
  require_principal_branch(a);
  return db_sqrt(a);
}

Matrix logm_real(const Matrix& a) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::DimensionMismatch, "logm needs a square matrix");
  require_principal_branch(a);
  const Eigen::Index n = a.rows();
  const Matrix id = Matrix::Identity(n, n);
  Matrix x = a;
  int squarings = 0;
  while ((x - id).cwiseAbs().rowwise().sum().maxCoeff() > 0.05 && squarings < 60) {
    x = db_sqrt(x);
    ++squarings;
  }
  // log(I+E) = 2 atanh(E (2I+E)^{-1}), odd series in the transformed matrix.
  const Matrix e = x - id;
  const Matrix w = (2.0 * id + e).partialPivLu().solve(e);
  const Matrix w2 = w * w;
  Matrix term = w;
  Matrix sum = w;
  for (int k = 1; k < 40; ++k) {
    term = term * w2;
    const Matrix add = term / (2.0 * k + 1.0);
    sum += add;
    if (add.cwiseAbs().maxCoeff() < 1e-18) break;
  }
  return std::ldexp(2.0, squarings) * sum;
}

}  // namespace quadent
