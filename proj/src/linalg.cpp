#include "cheblr/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cheblr {

namespace {

void check_tall_thin(const Matrix& v_hat) {
  if (v_hat.rows() != v_hat.cols() + 1) {
    throw InvalidArgument("expected an (r+1) x r matrix, got " +
                          std::to_string(v_hat.rows()) + "x" +
                          std::to_string(v_hat.cols()));
  }
}

void check_diagonal(const Matrix& upper, double scale) {
  const double thr = kSingularTol * scale;
  for (std::size_t i = 0; i < upper.rows(); ++i) {
    if (!(std::abs(upper(i, i)) >= thr) || scale == 0.0) {
      throw SingularSubmatrix("|r_" + std::to_string(i) + std::to_string(i) +
                              "| = " + std::to_string(std::abs(upper(i, i))) +
                              " below threshold");
    }
  }
}

struct Givens {
  double c;
  double s;
};

// Rotation with [c s; -s c] [a; b] = [rho; 0].
Givens make_givens(double a, double b) {
  if (b == 0.0) return {1.0, 0.0};
  const double rho = std::hypot(a, b);
  return {a / rho, b / rho};
}

// Rotates rows p, q of m.
void rotate_rows(Matrix& m, std::size_t p, std::size_t q, Givens g,
                 std::size_t from_col = 0) {
  auto rp = m.row(p);
  auto rq = m.row(q);
  for (std::size_t j = from_col; j < m.cols(); ++j) {
    const double x = rp[j];
    const double y = rq[j];
    rp[j] = g.c * x + g.s * y;
    rq[j] = -g.s * x + g.c * y;
  }
}

}  // namespace

Matrix CompleteQR::q_main() const {
  const std::size_t r = rank();
  Matrix q(r + 1, r);
  for (std::size_t i = 0; i <= r; ++i)
    for (std::size_t j = 0; j < r; ++j) q(i, j) = orth(i, j);
  return q;
}

Vector CompleteQR::q_comp() const { return orth.col(rank()); }

CompleteQR complete_qr(const Matrix& v_hat) {
  check_tall_thin(v_hat);
  const std::size_t n = v_hat.cols();
  const std::size_t m = n + 1;

  Matrix work = v_hat;
  Matrix q = Matrix::identity(m);
  Vector v(m);
  Vector s(n);

  for (std::size_t k = 0; k < n; ++k) {
    double norm = 0.0;
    for (std::size_t i = k; i < m; ++i) norm += work(i, k) * work(i, k);
    norm = std::sqrt(norm);
    if (norm == 0.0) continue;
    const double alpha = work(k, k) > 0 ? -norm : norm;
    for (std::size_t i = k; i < m; ++i) v[i] = work(i, k);
    v[k] -= alpha;
    double vtv = 0.0;
    for (std::size_t i = k; i < m; ++i) vtv += v[i] * v[i];
    if (vtv == 0.0) continue;
    const double beta = 2.0 / vtv;

    std::fill(s.begin() + k, s.end(), 0.0);
    for (std::size_t i = k; i < m; ++i) {
      const double vi = v[i];
      auto wi = work.row(i);
      for (std::size_t j = k; j < n; ++j) s[j] += vi * wi[j];
    }
    for (std::size_t i = k; i < m; ++i) {
      const double f = beta * v[i];
      auto wi = work.row(i);
      for (std::size_t j = k; j < n; ++j) wi[j] -= f * s[j];
    }
    work(k, k) = alpha;
    for (std::size_t i = k + 1; i < m; ++i) work(i, k) = 0.0;

    for (std::size_t p = 0; p < m; ++p) {
      auto qp = q.row(p);
      double t = 0.0;
      for (std::size_t i = k; i < m; ++i) t += qp[i] * v[i];
      t *= beta;
      for (std::size_t i = k; i < m; ++i) qp[i] -= t * v[i];
    }
  }

  Matrix upper(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) upper(i, j) = work(i, j);
  check_diagonal(upper, v_hat.max_abs());
  return CompleteQR{std::move(q), std::move(upper), v_hat, 0};
}

Vector solve_upper_triangular(const Matrix& r_upper, std::span<const double> b) {
  const std::size_t n = r_upper.rows();
  if (r_upper.cols() != n || b.size() != n)
    throw InvalidArgument("triangular solve dimension mismatch");
  Vector x(b.begin(), b.end());
  for (std::size_t ii = n; ii-- > 0;) {
    auto ri = r_upper.row(ii);
    double t = x[ii];
    for (std::size_t j = ii + 1; j < n; ++j) t -= ri[j] * x[j];
    if (ri[ii] == 0.0)
      throw SingularSubmatrix("zero diagonal in triangular solve");
    x[ii] = t / ri[ii];
  }
  return x;
}

Vector solve_upper_triangular_transposed(const Matrix& r_upper,
                                         std::span<const double> b) {
  const std::size_t n = r_upper.rows();
  if (r_upper.cols() != n || b.size() != n)
    throw InvalidArgument("triangular solve dimension mismatch");
  Vector x(b.begin(), b.end());
  // Column-oriented forward substitution keeps row-major access.
  for (std::size_t i = 0; i < n; ++i) {
    auto ri = r_upper.row(i);
    if (ri[i] == 0.0)
      throw SingularSubmatrix("zero diagonal in triangular solve");
    x[i] /= ri[i];
    const double xi = x[i];
    for (std::size_t j = i + 1; j < n; ++j) x[j] -= ri[j] * xi;
  }
  return x;
}

CompleteQR qr_rank1_row_replace(const CompleteQR& qr, std::size_t k,
                                std::span<const double> h) {
  const std::size_t n = qr.rank();
  const std::size_t m = n + 1;
  if (k >= m) throw InvalidArgument("row index out of range");
  if (h.size() != n) throw InvalidArgument("replacement row has wrong length");

  Matrix factored = qr.factored;
  std::copy(h.begin(), h.end(), factored.row(k).begin());
  if (qr.updates_since_refresh + 1 >= kRefreshInterval) {
    return complete_qr(factored);
  }

  // factored_new = factored + e_k d^T with d = h - old row k.
  Vector d(n);
  for (std::size_t j = 0; j < n; ++j) d[j] = h[j] - qr.factored(k, j);

  // Column rotations of Q are row rotations of Q^T, which is contiguous.
  Matrix qt = qr.orth.transpose();
  Matrix r(m, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) r(i, j) = qr.upper(i, j);

  // w = Q^T e_k, reduced to a multiple of e_1 from the bottom up; R turns
  // upper Hessenberg along the way.
  Vector w(m);
  for (std::size_t i = 0; i < m; ++i) w[i] = qt(i, k);
  for (std::size_t i = m - 1; i > 0; --i) {
    const Givens g = make_givens(w[i - 1], w[i]);
    w[i - 1] = g.c * w[i - 1] + g.s * w[i];
    w[i] = 0.0;
    rotate_rows(r, i - 1, i, g, i - 1);
    rotate_rows(qt, i - 1, i, g);
  }
  for (std::size_t j = 0; j < n; ++j) r(0, j) += w[0] * d[j];

  // Chase the subdiagonal back to upper-triangular form.
  for (std::size_t i = 0; i < n; ++i) {
    const Givens g = make_givens(r(i, i), r(i + 1, i));
    rotate_rows(r, i, i + 1, g, i);
    r(i + 1, i) = 0.0;
    rotate_rows(qt, i, i + 1, g);
  }

  Matrix upper(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) upper(i, j) = r(i, j);
  check_diagonal(upper, factored.max_abs());
  return CompleteQR{qt.transpose(), std::move(upper), std::move(factored),
                    qr.updates_since_refresh + 1};
}

std::vector<int> det_signs_from_complement(std::span<const double> q_comp) {
  const double thr = kSingularTol * norm2(q_comp);
  std::vector<int> sigma(q_comp.size());
  for (std::size_t j = 0; j < q_comp.size(); ++j) {
    if (!(std::abs(q_comp[j]) > thr)) {
      throw DegenerateComplement("component " + std::to_string(j) +
                                 " of the orthogonal complement is zero");
    }
    // 1-based position j+1: factor (-1)^(j+1).
    const int parity = (j % 2 == 0) ? -1 : 1;
    sigma[j] = parity * sign_of(q_comp[j]);
  }
  return sigma;
}

LuDeterminant lu_determinant(const Matrix& m) {
  const std::size_t n = m.rows();
  if (m.cols() != n) throw InvalidArgument("determinant of non-square matrix");
  Matrix a = m;
  const double thr = kSingularTol * m.max_abs();
  double det = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    if (!(std::abs(a(piv, k)) > thr)) return {0.0, true};
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      det = -det;
    }
    det *= a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a(i, k) / a(k, k);
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  return {det, false};
}

Vector lu_solve(const Matrix& m, std::span<const double> b) {
  const std::size_t n = m.rows();
  if (m.cols() != n || b.size() != n)
    throw InvalidArgument("lu_solve dimension mismatch");
  Matrix a = m;
  Vector x(b.begin(), b.end());
  const double thr = kSingularTol * m.max_abs();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    if (!(std::abs(a(piv, k)) > thr))
      throw SingularSubmatrix("singular pivot in elimination");
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      std::swap(x[k], x[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a(i, k) / a(k, k);
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
      x[i] -= f * x[k];
    }
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double t = x[ii];
    for (std::size_t j = ii + 1; j < n; ++j) t -= a(ii, j) * x[j];
    x[ii] = t / a(ii, ii);
  }
  return x;
}

std::vector<int> minor_signs_explicit(const Matrix& v_hat) {
  check_tall_thin(v_hat);
  const std::size_t m = v_hat.rows();
  std::vector<std::size_t> keep(m - 1);
  std::vector<int> signs(m);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0, p = 0; i < m; ++i)
      if (i != j) keep[p++] = i;
    const LuDeterminant d = lu_determinant(v_hat.select_rows(keep));
    if (d.singular)
      throw SingularSubmatrix("minor D_" + std::to_string(j + 1) + " vanishes");
    signs[j] = sign_of(d.value);
  }
  return signs;
}

}  // namespace cheblr
