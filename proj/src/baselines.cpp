#include "cheblr/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cheblr/errors.hpp"

namespace cheblr {

JacobiSvd jacobi_svd(const Matrix& a) {
  const std::size_t m = a.rows(), n = a.cols();
  // Columns are rotated in place, so work on the transpose: row p of wt is
  // column p of W.
  Matrix wt = a.transpose();
  Matrix vt = Matrix::identity(n);

  double gram_f2 = 0.0;
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) {
      const double g = dot(wt.row(p), wt.row(q));
      gram_f2 += g * g;
    }
  const double threshold = kJacobiTol * std::sqrt(gram_f2);

  auto rotate = [](std::span<double> x, std::span<double> y, double c, double s) {
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double xk = x[k], yk = y[k];
      x[k] = c * xk - s * yk;
      y[k] = s * xk + c * yk;
    }
  };

  JacobiSvd out;
  bool converged = n < 2 || threshold == 0.0;
  while (!converged) {
    if (out.sweeps == kJacobiSweepCap)
      throw ConvergenceFailure("one-sided Jacobi did not converge in " +
                               std::to_string(kJacobiSweepCap) + " sweeps");
    ++out.sweeps;
    double off2 = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        auto wp = wt.row(p), wq = wt.row(q);
        const double alpha = dot(wp, wp);
        const double beta = dot(wq, wq);
        const double gamma = dot(wp, wq);
        off2 += 2.0 * gamma * gamma;
        if (gamma == 0.0) continue;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::hypot(1.0, t);
        const double s = c * t;
        rotate(wp, wq, c, s);
        rotate(vt.row(p), vt.row(q), c, s);
      }
    }
    converged = std::sqrt(off2) <= threshold;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Vector norms(n);
  for (std::size_t p = 0; p < n; ++p) norms[p] = norm2(wt.row(p));
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return norms[x] > norms[y]; });

  out.w = Matrix(m, n);
  out.v = Matrix(n, n);
  out.sigma.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t p = order[k];
    out.sigma[k] = norms[p];
    for (std::size_t i = 0; i < m; ++i) out.w(i, k) = wt(p, i);
    for (std::size_t i = 0; i < n; ++i) out.v(i, k) = vt(p, i);
  }
  return out;
}

FactorPair truncated_svd(const Matrix& a, std::size_t rank) {
  if (rank < 1 || rank > std::min(a.rows(), a.cols()))
    throw InvalidArgument("rank must satisfy 1 <= r <= min(m, n)");
  const JacobiSvd svd = jacobi_svd(a);
  FactorPair fp;
  fp.u = Matrix(a.rows(), rank);
  fp.v = Matrix(a.cols(), rank);
  for (std::size_t k = 0; k < rank; ++k) {
    for (std::size_t i = 0; i < a.rows(); ++i) fp.u(i, k) = svd.w(i, k);
    for (std::size_t j = 0; j < a.cols(); ++j) fp.v(j, k) = svd.v(j, k);
  }
  fp.cheb_error = residual_max_abs(a, fp.u, fp.v);
  fp.trace = {fp.cheb_error};
  fp.iterations = svd.sweeps;
  fp.converged = true;
  return fp;
}

}  // namespace cheblr
