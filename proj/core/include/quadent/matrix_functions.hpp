#pragma once

#include "quadent/phase_space.hpp"

namespace quadent {

/// Real matrix exponential (Pade scaling-and-squaring).
Matrix expm(const Matrix& a);

/// Principal square root via scaled Denman-Beavers iteration.
/// Throws NoRealLogarithm if a has eigenvalues on the closed negative real axis.
Matrix sqrtm_real(const Matrix& a);

/// Principal real logarithm via inverse scaling-and-squaring.
/// Throws NoRealLogarithm for negative real eigenvalues, SingularM for (near) zero ones.
Matrix logm_real(const Matrix& a);

}  // namespace quadent
