#pragma once

#include <cstddef>

#include "cheblr/altmin.hpp"
#include "cheblr/matrix.hpp"

namespace cheblr {

inline constexpr std::size_t kJacobiSweepCap = 50;
inline constexpr double kJacobiTol = 1e-12;

/// Thin SVD by one-sided Jacobi: A = W V^T, where the columns of W are the
/// left singular vectors scaled by sigma (descending) and V is orthogonal.
struct JacobiSvd {
  Matrix w;      // m x n
  Matrix v;      // n x n
  Vector sigma;  // n, descending
  std::size_t sweeps = 0;
};

/// Throws ConvergenceFailure if the off-diagonal mass of W^T W is still
/// above kJacobiTol * ||A^T A||_F after kJacobiSweepCap sweeps.
JacobiSvd jacobi_svd(const Matrix& a);

/// Best rank-r approximation in the Frobenius norm as U = left vectors times
/// sigma, V = right vectors; cheb_error is its Chebyshev-norm error.
FactorPair truncated_svd(const Matrix& a, std::size_t rank);

}  // namespace cheblr
