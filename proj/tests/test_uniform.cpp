#include <doctest.h>

#include <cmath>

#include "cheblr/rng.hpp"
#include "cheblr/uniform.hpp"
#include "oracles.hpp"

using namespace cheblr;

namespace {

const Matrix kVandermonde{{1, 0.0}, {1, 0.5}, {1, 1.0}};
const Vector kSquares{0.0, 0.25, 1.0};

}  // namespace

TEST_CASE("solve_small: midpoint of two interpolants") {
  const SmallSolution s = solve_small(complete_qr(Matrix{{1}, {1}}), Vector{0, 2});
  CHECK(std::abs(s.c_hat) == doctest::Approx(1.0));
  CHECK(s.u[0] == doctest::Approx(1.0));
}

TEST_CASE("solve_small: exact fit has zero level") {
  const SmallSolution s = solve_small(complete_qr(Matrix{{1}, {1}}), Vector{3, 3});
  CHECK(s.c_hat == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(s.u[0] == doctest::Approx(3.0));
}

TEST_CASE("solve_small: linear fit of x^2 at three nodes") {
  const SmallSolution s = solve_small(complete_qr(kVandermonde), kSquares);
  CHECK(s.u[0] == doctest::Approx(-0.125));
  CHECK(s.u[1] == doctest::Approx(1.0));
  CHECK(std::abs(s.c_hat) == doctest::Approx(0.125));
  for (std::size_t j = 0; j < 3; ++j) {
    const double w = kSquares[j] - s.u[0] - s.u[1] * kVandermonde(j, 1);
    CHECK(w == doctest::Approx(j == 1 ? -0.125 : 0.125));
  }
  const DirectSolution d = dzyadyk_direct(kVandermonde, kSquares);
  CHECK(d.u[0] == doctest::Approx(-0.125));
  CHECK(d.u[1] == doctest::Approx(1.0));
  CHECK(d.error == doctest::Approx(0.125));
}

TEST_CASE("min_error_of_subset") {
  CHECK(min_error_of_subset(Vector{1, -1}, Vector{0, 2}) == doctest::Approx(1.0));
  CHECK(min_error_of_subset(Vector{0.3, 2, -7}, Vector{0, 0, 0}) == 0.0);
  CHECK(min_error_of_subset(Vector{1, -2, 1}, kSquares) == doctest::Approx(0.125));
}

TEST_CASE("dzyadyk_direct") {
  const DirectSolution d = dzyadyk_direct(Matrix{{1}, {1}}, Vector{0, 2});
  CHECK(d.u[0] == doctest::Approx(1.0));
  CHECK(d.error == doctest::Approx(1.0));

  // a in the image of V
  const DirectSolution e = dzyadyk_direct(kVandermonde, Vector{1, 2, 3});
  CHECK(e.error == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(e.u[0] == doctest::Approx(1.0));
  CHECK(e.u[1] == doctest::Approx(2.0));

  CHECK_THROWS_AS(dzyadyk_direct(Matrix(10, 9), Vector(10)), SizeLimit);
  CHECK_THROWS_AS(dzyadyk_direct(Matrix{{1, 2}, {2, 4}, {0, 1}}, Vector{1, 2, 3}),
                  SingularSubmatrix);
}

TEST_CASE("solve_small agrees with dzyadyk_direct and min_error_of_subset") {
  Rng rng(1);
  for (int t = 0; t < 300; ++t) {
    const std::size_t r = 1 + static_cast<std::size_t>(t % 6);
    const Matrix v = oracle::random_chebyshev(r + 1, r, rng);
    const Vector a = gaussian_vector(r + 1, rng);
    const CompleteQR qr = complete_qr(v);
    const SmallSolution s = solve_small(qr, a);
    const DirectSolution d = dzyadyk_direct(v, a);
    for (std::size_t k = 0; k < r; ++k)
      REQUIRE(std::abs(s.u[k] - d.u[k]) <= 1e-9 * std::max(1.0, std::abs(d.u[k])));
    REQUIRE(std::abs(std::abs(s.c_hat) - d.error) <= 1e-9 * std::max(1.0, d.error));
    REQUIRE(std::abs(min_error_of_subset(qr.q_comp(), a) - d.error) <= 1e-9 * std::max(1.0, d.error));
  }
}

TEST_CASE("best_replacement: 2x1 hand case") {
  const Replacement rep =
      best_replacement(complete_qr(Matrix{{1}, {1}}), Vector{0, 1}, Vector{1}, 10.0);
  CHECK(rep.position == 1);
  CHECK(rep.error == doctest::Approx(5.0));
}

TEST_CASE("replacement_errors: swapping a row for itself keeps the subset error") {
  Rng rng(2);
  for (std::size_t r = 1; r <= 6; ++r) {
    const Matrix v = oracle::random_chebyshev(r + 1, r, rng);
    const Vector a = gaussian_vector(r + 1, rng);
    const CompleteQR qr = complete_qr(v);
    const double current = std::abs(solve_small(qr, a).c_hat);
    for (std::size_t k = 0; k <= r; ++k) {
      const Vector h(v.row(k).begin(), v.row(k).end());
      const Vector mu = replacement_errors(qr, a, h, a[k]);
      CHECK(mu[k] == doctest::Approx(current).epsilon(1e-12));
    }
  }
}

TEST_CASE("best_replacement matches exhaustive evaluation of every swap") {
  Rng rng(3);
  for (int t = 0; t < 300; ++t) {
    const std::size_t r = 1 + static_cast<std::size_t>(t % 6);
    const Matrix v = oracle::random_chebyshev(r + 2, r, rng);
    const Matrix v_hat = v.select_rows(std::vector<std::size_t>(
        [&] { std::vector<std::size_t> i(r + 1); for (std::size_t k = 0; k <= r; ++k) i[k] = k; return i; }()));
    const Vector a = gaussian_vector(r + 2, rng);
    const Vector a_hat(a.begin(), a.begin() + static_cast<long>(r + 1));
    const Vector h(v.row(r + 1).begin(), v.row(r + 1).end());
    const double xi = a[r + 1];

    std::size_t best_k = 0;
    double best_mu = -1.0;
    for (std::size_t k = 0; k <= r; ++k) {
      Matrix w = v_hat;
      std::copy(h.begin(), h.end(), w.row(k).begin());
      Vector aw = a_hat;
      aw[k] = xi;
      const double mu = dzyadyk_direct(w, aw).error;
      if (mu > best_mu) {
        best_mu = mu;
        best_k = k;
      }
    }
    const Replacement rep = best_replacement(complete_qr(v_hat), a_hat, h, xi);
    REQUIRE(rep.error == doctest::Approx(best_mu).epsilon(1e-9));
    // positions may tie only up to rounding; require the chosen one attains
    // the maximum.
    if (rep.position != best_k) {
      Matrix w = v_hat;
      std::copy(h.begin(), h.end(), w.row(rep.position).begin());
      Vector aw = a_hat;
      aw[rep.position] = xi;
      REQUIRE(dzyadyk_direct(w, aw).error == doctest::Approx(best_mu).epsilon(1e-9));
    }
  }
}

TEST_CASE("solve_uniform: constant fit is the midrange") {
  const UniformSolution s =
      solve_uniform(Matrix{{1}, {1}, {1}, {1}}, Vector{0, 1, 2, 10});
  CHECK(s.u[0] == doctest::Approx(5.0));
  CHECK(s.error == doctest::Approx(5.0));
  CHECK(s.char_set.sorted() == std::vector<std::size_t>{0, 3});
}

TEST_CASE("solve_uniform: scalar fit agrees with grid search") {
  const Matrix v{{1}, {2}, {3}};
  const Vector a{1, 1, 1};
  const UniformSolution s = solve_uniform(v, a);
  double arg = 0.0;
  const double grid =
      oracle::scalar_grid_minimum({1, 2, 3}, {1, 1, 1}, -2, 2, 400000, &arg);
  CHECK(s.u[0] == doctest::Approx(0.5));
  CHECK(arg == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(s.error == doctest::Approx(grid).epsilon(1e-5));
  CHECK(s.residual[0] == doctest::Approx(0.5));
  CHECK(s.residual[1] == doctest::Approx(0.0));
  CHECK(s.residual[2] == doctest::Approx(-0.5));
  CHECK(s.char_set.sorted() == std::vector<std::size_t>{0, 2});
}

TEST_CASE("solve_uniform agrees with the enumeration oracle") {
  Rng rng(4);
  for (int t = 0; t < 500; ++t) {
    const std::size_t r = 1 + static_cast<std::size_t>(t % 3);
    std::uniform_int_distribution<std::size_t> size(std::max<std::size_t>(5, r + 1), 10);
    const std::size_t n = size(rng);
    const Matrix v = oracle::random_chebyshev(n, r, rng);
    const Vector a = gaussian_vector(n, rng);
    const UniformSolution s = solve_uniform(v, a);
    const UniformSolution b = brute_force_uniform(v, a);
    REQUIRE(std::abs(s.error - b.error) <= 1e-9 * std::max(1.0, b.error));
    for (std::size_t j = 0; j < n; ++j)
      REQUIRE(std::abs(s.residual[j] - b.residual[j]) <= 1e-8);

    // solution invariants
    double resid = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      resid = std::max(resid, std::abs(a[j] - dot(v.row(j), s.u) - s.residual[j]));
    REQUIRE(resid <= 1e-12 * std::max(max_abs(a), s.error));
    REQUIRE(std::abs(max_abs(s.residual) - s.error) <= 1e-12 * s.error);
    for (std::size_t k = 0; k <= r; ++k)
      REQUIRE(std::abs(s.residual[s.char_set[k]]) >= (1 - 1e-10) * s.error);
    for (std::size_t k = 1; k < s.subset_errors.size(); ++k)
      REQUIRE(s.subset_errors[k] > s.subset_errors[k - 1] * (1 - 1e-14));
  }
}

TEST_CASE("brute_force_uniform: every subset error is bounded by the result") {
  Rng rng(5);
  const Matrix v = oracle::random_chebyshev(7, 2, rng);
  const Vector a = gaussian_vector(7, rng);
  const UniformSolution b = brute_force_uniform(v, a);
  std::vector<std::size_t> c = detail::first_combination(3);
  do {
    Vector ah{a[c[0]], a[c[1]], a[c[2]]};
    CHECK(dzyadyk_direct(v.select_rows(c), ah).error <= b.error * (1 + 1e-12));
  } while (detail::next_combination(c, 7));

  // a in the image of V
  const Vector x{0.7, -1.3};
  Vector img(7);
  for (std::size_t j = 0; j < 7; ++j) img[j] = dot(v.row(j), x);
  CHECK(brute_force_uniform(v, img).error <= 1e-12);
  CHECK(solve_uniform(v, img).error <= 1e-12);

  CHECK_THROWS_AS(brute_force_uniform(Matrix(15, 1), Vector(15)), SizeLimit);
}

TEST_CASE("solve_uniform is homogeneous in the right-hand side") {
  Rng rng(6);
  for (int t = 0; t < 50; ++t) {
    const std::size_t r = 1 + static_cast<std::size_t>(t % 4);
    const Matrix v = gaussian_matrix(30, r, rng);
    const Vector a = gaussian_vector(30, rng);
    const UniformSolution s = solve_uniform(v, a);
    for (double alpha : {-3.0, 2.0}) {
      Vector b = a;
      for (double& x : b) x *= alpha;
      const UniformSolution sb = solve_uniform(v, b);
      CHECK(sb.error == doctest::Approx(std::abs(alpha) * s.error).epsilon(1e-10));
      for (std::size_t k = 0; k < r; ++k)
        CHECK(sb.u[k] == doctest::Approx(alpha * s.u[k]).epsilon(1e-8));
    }
  }
}

TEST_CASE("solve_uniform: strict increase on exactly representable data") {
  // Small-integer data: every subset error is a ratio of small integers.
  const Matrix v{{1, 0}, {1, 1}, {1, 2}, {1, 3}, {1, 4}, {1, 5}};
  const Vector a{0, 3, -2, 5, 1, 9};
  const UniformSolution s = solve_uniform(v, a);
  for (std::size_t k = 1; k < s.subset_errors.size(); ++k)
    CHECK(s.subset_errors[k] > s.subset_errors[k - 1]);
  CHECK(s.error == doctest::Approx(brute_force_uniform(v, a).error));
}

TEST_CASE("solve_uniform honours an explicit initial working set") {
  Rng rng(9);
  const Matrix v = gaussian_matrix(40, 3, rng);
  const Vector a = gaussian_vector(40, rng);
  const UniformSolution s0 = solve_uniform(v, a);
  const UniformSolution s1 = solve_uniform(v, a, WorkingSet({5, 17, 2, 33}, 40));
  CHECK(s1.error == doctest::Approx(s0.error).epsilon(1e-12));
  // starting from the characteristic set terminates immediately
  const UniformSolution s2 = solve_uniform(v, a, s0.char_set);
  CHECK(s2.iterations == 0);
  CHECK_THROWS_AS(solve_uniform(v, a, WorkingSet({1, 2}, 40)), InvalidArgument);
  CHECK_THROWS_AS(WorkingSet({1, 1, 2, 3}, 40), InvalidArgument);
  CHECK_THROWS_AS(WorkingSet({1, 2, 3, 40}, 40), InvalidArgument);
}

TEST_CASE("initial_working_set falls back when the largest entries are singular") {
  // rows 0 and 1 are parallel and carry the largest |a|
  const Matrix v{{1, 1}, {2, 2}, {1, 0}, {0, 1}, {1, -1}};
  const Vector a{10, 9, 0.1, 0.2, 0.3};
  const auto [set, qr] = initial_working_set(v, a);
  CHECK(set.size() == 3);
  CHECK_FALSE((set.contains(0) && set.contains(1)));
  CHECK(det_signs_from_complement(qr.q_comp()).size() == 3);

  // zero row: any set containing it has a degenerate complement
  const Matrix z{{0}, {1}, {2}, {3}};
  const auto [zs, zqr] = initial_working_set(z, Vector{10, 1, 2, 0.5});
  CHECK_FALSE(zs.contains(0));

  CHECK_THROWS_AS(initial_working_set(Matrix{{0}, {0}, {0}}, Vector{1, 2, 3}),
                  SingularSubmatrix);
}
