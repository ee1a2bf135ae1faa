// Test-only reference computations. Nothing here calls into the library's
// factorization or exchange code, so these stay independent of the paths
// they check.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "cheblr/detail/combinations.hpp"
#include "cheblr/matrix.hpp"
#include "cheblr/rng.hpp"

namespace cheblr::oracle {

/// Laplace expansion along the first row.
inline double cofactor_det(const Matrix& m) {
  const std::size_t n = m.rows();
  if (n == 1) return m(0, 0);
  if (n == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  double det = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    Matrix minor(n - 1, n - 1);
    for (std::size_t i = 1; i < n; ++i)
      for (std::size_t j = 0, q = 0; j < n; ++j)
        if (j != c) minor(i - 1, q++) = m(i, j);
    det += ((c % 2 == 0) ? 1.0 : -1.0) * m(0, c) * cofactor_det(minor);
  }
  return det;
}

/// D_j of an (r+1) x r matrix, j = 0..r (0-based position of the dropped row).
inline std::vector<double> maximal_minors(const Matrix& v_hat) {
  const std::size_t m = v_hat.rows();
  std::vector<double> d(m);
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < m; ++i)
      if (i != j) keep.push_back(i);
    d[j] = cofactor_det(v_hat.select_rows(keep));
  }
  return d;
}

/// Every r x r minor bounded away from zero relative to the entry scale.
inline bool is_chebyshev(const Matrix& v, double rel = 1e-6) {
  const std::size_t r = v.cols();
  const double scale = std::pow(v.max_abs(), static_cast<double>(r));
  std::vector<std::size_t> c = detail::first_combination(r);
  do {
    if (std::abs(cofactor_det(v.select_rows(c))) <= rel * scale) return false;
  } while (detail::next_combination(c, v.rows()));
  return true;
}

/// min over u on a uniform grid of max_j |a_j - v_j u| for a single column v.
inline double scalar_grid_minimum(const std::vector<double>& v,
                                  const std::vector<double>& a, double lo,
                                  double hi, std::size_t steps, double* arg) {
  double best = 1e300;
  for (std::size_t s = 0; s <= steps; ++s) {
    const double u = lo + (hi - lo) * static_cast<double>(s) / static_cast<double>(steps);
    double e = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) e = std::max(e, std::abs(a[j] - v[j] * u));
    if (e < best) {
      best = e;
      if (arg) *arg = u;
    }
  }
  return best;
}

inline Matrix random_chebyshev(std::size_t rows, std::size_t cols, Rng& rng) {
  for (;;) {
    Matrix m = gaussian_matrix(rows, cols, rng);
    if (rows > 14 || is_chebyshev(m)) return m;
  }
}

}  // namespace cheblr::oracle
