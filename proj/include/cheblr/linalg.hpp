#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cheblr/matrix.hpp"

namespace cheblr {

/// Relative threshold below which a diagonal entry of R, a component of the
/// orthogonal complement, or an LU pivot is treated as zero.
inline constexpr double kSingularTol = 1e-13;

/// Number of rank-1 row replacements after which the factorization is
/// recomputed from scratch to bound accumulated rounding drift.
inline constexpr int kRefreshInterval = 256;

/// Complete QR factorization of an (r+1) x r matrix:
///
///   factored = [Q | q'] * [R; 0]
///
/// `orth` stores the full (r+1) x (r+1) orthogonal factor; its first r
/// columns are Q and its last column is the complement q' spanning
/// ker(factored^T). The factored matrix is kept alongside so that row
/// replacements and periodic refreshes need nothing else.
struct CompleteQR {
  Matrix orth;
  Matrix upper;
  Matrix factored;
  int updates_since_refresh = 0;

  std::size_t rank() const noexcept { return upper.rows(); }
  Matrix q_main() const;
  Vector q_comp() const;
  double q_comp(std::size_t j) const noexcept { return orth(j, rank()); }
};

/// Householder factorization of an (r+1) x r matrix.
/// Throws SingularSubmatrix if |r_ii| < kSingularTol * max|v_hat|.
CompleteQR complete_qr(const Matrix& v_hat);

/// Back substitution R x = b. Throws SingularSubmatrix on a zero diagonal.
Vector solve_upper_triangular(const Matrix& r_upper, std::span<const double> b);

/// Forward substitution R^T x = b for upper-triangular R.
Vector solve_upper_triangular_transposed(const Matrix& r_upper,
                                         std::span<const double> b);

/// Refactor after replacing row `k` (0-based) of the factored matrix with
/// `h`, via a Givens sweep on the full orthogonal factor in O(r^2). Every
/// kRefreshInterval updates the factorization is rebuilt from scratch.
CompleteQR qr_rank1_row_replace(const CompleteQR& qr, std::size_t k,
                                std::span<const double> h);

/// Signs of the maximal minors D_j of the factored matrix, read off the
/// orthogonal complement: sigma_j = (-1)^j sign(q'_j) (1-based j). They match
/// sign(D_j) up to one sign common to all j.
/// Throws DegenerateComplement if some |q'_j| <= kSingularTol * ||q'||_2.
std::vector<int> det_signs_from_complement(std::span<const double> q_comp);

/// Gaussian elimination with partial pivoting on a square matrix.
struct LuDeterminant {
  double value = 0.0;
  bool singular = true;
};
LuDeterminant lu_determinant(const Matrix& m);

/// Solves the square system m x = b by partial-pivoting elimination.
/// Throws SingularSubmatrix if a pivot falls below kSingularTol * max|m|.
Vector lu_solve(const Matrix& m, std::span<const double> b);

/// Signs of the r+1 maximal minors D_j(v_hat), j = 1..r+1 (0-based in the
/// returned vector), each computed by its own explicit determinant.
/// Throws SingularSubmatrix if any minor is singular.
std::vector<int> minor_signs_explicit(const Matrix& v_hat);

}  // namespace cheblr
