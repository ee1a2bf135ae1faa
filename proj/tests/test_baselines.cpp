#include <doctest.h>

#include <cmath>

#include "cheblr/baselines.hpp"
#include "cheblr/matgen.hpp"
#include "cheblr/rng.hpp"

using namespace cheblr;

namespace {

double frobenius(const Matrix& m) { return norm2(m.data()); }

}  // namespace

TEST_CASE("truncated_svd of diag(3,1) at rank 1") {
  const FactorPair fp = truncated_svd(Matrix{{3.0, 0.0}, {0.0, 1.0}}, 1);
  const Matrix approx = multiply_transposed(fp.u, fp.v);
  CHECK(approx(0, 0) == doctest::Approx(3.0));
  CHECK(std::abs(approx(0, 1)) <= 1e-14);
  CHECK(std::abs(approx(1, 0)) <= 1e-14);
  CHECK(std::abs(approx(1, 1)) <= 1e-14);
  CHECK(fp.cheb_error == doctest::Approx(1.0));
}

TEST_CASE("truncated_svd recovers exact rank-r matrices") {
  Rng rng(31);
  for (std::size_t r = 1; r <= 4; ++r) {
    const Matrix a = multiply_transposed(gaussian_matrix(12, r, rng), gaussian_matrix(9, r, rng));
    CHECK(truncated_svd(a, r).cheb_error <= 1e-10);
  }
}

TEST_CASE("jacobi_svd: orthogonal V, orthogonal columns of W, reconstruction") {
  Rng rng(32);
  const Matrix a = gaussian_matrix(15, 8, rng);
  const JacobiSvd svd = jacobi_svd(a);
  const Matrix vtv = svd.v.transpose() * svd.v;
  CHECK((vtv - Matrix::identity(8)).max_abs() <= 1e-8);
  const Matrix wtw = svd.w.transpose() * svd.w;
  for (std::size_t p = 0; p < 8; ++p) {
    CHECK(wtw(p, p) == doctest::Approx(svd.sigma[p] * svd.sigma[p]).epsilon(1e-12));
    for (std::size_t q = 0; q < 8; ++q)
      if (p != q) CHECK(std::abs(wtw(p, q)) <= 1e-8 * wtw(0, 0));
  }
  for (std::size_t k = 1; k < 8; ++k) CHECK(svd.sigma[k] <= svd.sigma[k - 1]);
  CHECK(residual_max_abs(a, svd.w, svd.v) <= 1e-12 * a.max_abs());
}

TEST_CASE("Frobenius error equals the tail of the singular values") {
  Rng rng(33);
  const Matrix a = gaussian_matrix(10, 7, rng);
  const JacobiSvd svd = jacobi_svd(a);
  for (std::size_t r = 1; r < 7; ++r) {
    const FactorPair fp = truncated_svd(a, r);
    double tail = 0.0;
    for (std::size_t k = r; k < 7; ++k) tail += svd.sigma[k] * svd.sigma[k];
    const double err = frobenius(a - multiply_transposed(fp.u, fp.v));
    CHECK(err == doctest::Approx(std::sqrt(tail)).epsilon(1e-8));
  }
}

TEST_CASE("Hilbert 64: fast decay and the norm sanity bound") {
  const Matrix h = hilbert(64);
  const JacobiSvd svd = jacobi_svd(h);
  for (std::size_t r = 1; r <= 10; ++r) {
    const FactorPair fp = truncated_svd(h, r);
    CHECK(fp.cheb_error >= svd.sigma[r] / 64.0 * (1.0 - 1e-9));
    CHECK(fp.cheb_error <= svd.sigma[r] * (1.0 + 1e-6) + 1e-15 * svd.sigma[0]);
  }
  // Each singular value is below 0.3 of its predecessor over the first ten.
  for (std::size_t k = 1; k <= 10; ++k) CHECK(svd.sigma[k] < 0.3 * svd.sigma[k - 1]);
  // Reference values from LAPACK (numpy.linalg.svd).
  CHECK(svd.sigma[0] == doctest::Approx(1.78603888).epsilon(1e-8));
  CHECK(svd.sigma[3] == doctest::Approx(1.68383787e-02).epsilon(1e-8));
  CHECK(svd.sigma[8] == doctest::Approx(9.13910335e-07).epsilon(1e-7));
}

TEST_CASE("truncated_svd rank precondition") {
  const Matrix a = Matrix::identity(3);
  CHECK_THROWS_AS(truncated_svd(a, 0), InvalidArgument);
  CHECK_THROWS_AS(truncated_svd(a, 4), InvalidArgument);
  CHECK(truncated_svd(a, 3).cheb_error <= 1e-15);
}
