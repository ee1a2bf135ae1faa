#include "cheblr/uniform.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cheblr/detail/combinations.hpp"
#include "cheblr/rng.hpp"

namespace cheblr {

namespace {

constexpr double kTerminationTol = 1e-12;
constexpr int kRandomStartAttempts = 32;
constexpr std::uint64_t kRandomStartSeed = 0x5eed5eedULL;

std::optional<CompleteQR> try_factor(const Matrix& v,
                                     std::span<const std::size_t> idx) {
  try {
    CompleteQR qr = complete_qr(v.select_rows(idx));
    det_signs_from_complement(qr.q_comp());
    return qr;
  } catch (const SingularSubmatrix&) {
  } catch (const DegenerateComplement&) {
  }
  return std::nullopt;
}

bool has_zero_component(const CompleteQR& qr) {
  const Vector q = qr.q_comp();
  const double thr = kSingularTol * norm2(q);
  return std::any_of(q.begin(), q.end(), [&](double x) { return !(std::abs(x) > thr); });
}

// Row indices ordered by decreasing |a_j|, smallest index first on ties.
std::vector<std::size_t> by_magnitude(std::span<const double> a) {
  std::vector<std::size_t> order(a.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return std::abs(a[x]) > std::abs(a[y]);
  });
  return order;
}

// Pivoted Gram-Schmidt over the rows of v: r rows of (greedily) maximal
// volume.
std::vector<std::size_t> greedy_volume_rows(const Matrix& v) {
  const std::size_t n = v.rows();
  const std::size_t r = v.cols();
  Matrix res = v;
  std::vector<bool> used(n, false);
  std::vector<std::size_t> picked;
  for (std::size_t step = 0; step < r; ++step) {
    std::size_t best = n;
    double best_norm = -1.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j]) continue;
      const double nj = norm2(res.row(j));
      if (nj > best_norm) {
        best_norm = nj;
        best = j;
      }
    }
    if (best == n || best_norm <= 0.0) break;
    used[best] = true;
    picked.push_back(best);
    Vector q(res.row(best).begin(), res.row(best).end());
    for (double& x : q) x /= best_norm;
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j]) continue;
      auto rj = res.row(j);
      const double p = dot(rj, q);
      for (std::size_t c = 0; c < r; ++c) rj[c] -= p * q[c];
    }
  }
  return picked;
}


}  // namespace

std::pair<WorkingSet, CompleteQR> initial_working_set(const Matrix& v,
                                                      std::span<const double> a) {
  const std::size_t n = v.rows();
  const std::size_t m = v.cols() + 1;
  const std::vector<std::size_t> order = by_magnitude(a);

  {
    std::vector<std::size_t> idx(order.begin(), order.begin() + m);
    std::sort(idx.begin(), idx.end());
    if (auto qr = try_factor(v, idx)) return {WorkingSet(idx, n), std::move(*qr)};
  }

  std::vector<std::size_t> base = greedy_volume_rows(v);
  if (base.size() + 1 == m) {
    for (std::size_t j : order) {
      if (std::find(base.begin(), base.end(), j) != base.end()) continue;
      std::vector<std::size_t> idx = base;
      idx.push_back(j);
      std::sort(idx.begin(), idx.end());
      if (auto qr = try_factor(v, idx)) return {WorkingSet(idx, n), std::move(*qr)};
    }
  }

  std::vector<std::size_t> pool(n);
  for (int attempt = 0; attempt < kRandomStartAttempts; ++attempt) {
    Rng rng(derive_seed(kRandomStartSeed, static_cast<std::uint64_t>(attempt)));
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t k = 0; k < m; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, n - 1);
      std::swap(pool[k], pool[pick(rng)]);
    }
    std::vector<std::size_t> idx(pool.begin(), pool.begin() + m);
    std::sort(idx.begin(), idx.end());
    if (auto qr = try_factor(v, idx)) return {WorkingSet(idx, n), std::move(*qr)};
  }
  throw SingularSubmatrix("no nonsingular (r+1)-row working set found");
}

WorkingSet::WorkingSet(std::vector<std::size_t> indices, std::size_t n)
    : indices_(std::move(indices)) {
  std::vector<std::size_t> s = sorted();
  if (std::adjacent_find(s.begin(), s.end()) != s.end())
    throw InvalidArgument("working set indices must be distinct");
  if (!s.empty() && s.back() >= n)
    throw InvalidArgument("working set index out of range");
}

bool WorkingSet::contains(std::size_t j) const noexcept {
  return std::find(indices_.begin(), indices_.end(), j) != indices_.end();
}

void WorkingSet::replace(std::size_t position, std::size_t index) {
  indices_.at(position) = index;
}

std::vector<std::size_t> WorkingSet::sorted() const {
  std::vector<std::size_t> s = indices_;
  std::sort(s.begin(), s.end());
  return s;
}

SmallSolution solve_small(const CompleteQR& qr, std::span<const double> a_hat,
                          Degeneracy policy) {
  const std::size_t r = qr.rank();
  if (a_hat.size() != r + 1) throw InvalidArgument("a_hat must have r+1 entries");

  double qa = 0.0;
  double q1 = 0.0;
  double q2 = 0.0;
  for (std::size_t j = 0; j <= r; ++j) {
    const double qj = qr.q_comp(j);
    qa += qj * a_hat[j];
    q1 += std::abs(qj);
    q2 += qj * qj;
  }
  const double thr = kSingularTol * std::sqrt(q2);
  Vector rhs(a_hat.begin(), a_hat.end());
  const double c = qa / q1;
  for (std::size_t j = 0; j <= r; ++j) {
    const double qj = qr.q_comp(j);
    if (!(std::abs(qj) > thr)) {
      if (policy == Degeneracy::Reject)
        throw DegenerateComplement("zero component in complement of working set");
      // a - w stays orthogonal to q' for any w_j here; interpolate.
      continue;
    }
    rhs[j] -= qj > 0 ? c : -c;
  }

  // Q^T (a - w), row-major over the orthogonal factor.
  Vector qt(r, 0.0);
  for (std::size_t i = 0; i <= r; ++i) {
    auto oi = qr.orth.row(i);
    const double x = rhs[i];
    for (std::size_t k = 0; k < r; ++k) qt[k] += oi[k] * x;
  }
  return {solve_upper_triangular(qr.upper, qt), c};
}

double min_error_of_subset(std::span<const double> q_comp,
                           std::span<const double> a_hat) {
  if (q_comp.size() != a_hat.size())
    throw InvalidArgument("null vector and right-hand side differ in length");
  const double q1 = norm1(q_comp);
  if (q1 == 0.0) throw InvalidArgument("null vector must be nonzero");
  return std::abs(dot(q_comp, a_hat)) / q1;
}

DirectSolution dzyadyk_direct(const Matrix& v_hat, std::span<const double> a_hat) {
  const std::size_t r = v_hat.cols();
  if (v_hat.rows() != r + 1 || a_hat.size() != r + 1)
    throw InvalidArgument("expected an (r+1) x r system");
  if (r > 8) throw SizeLimit("direct formula limited to r <= 8");

  std::vector<std::size_t> keep(r);
  Vector rhs(r);
  Vector u(r, 0.0);
  double weight_sum = 0.0;
  double alternating = 0.0;
  for (std::size_t j = 0; j <= r; ++j) {
    for (std::size_t i = 0, p = 0; i <= r; ++i) {
      if (i == j) continue;
      keep[p] = i;
      rhs[p] = a_hat[i];
      ++p;
    }
    const Matrix minor = v_hat.select_rows(keep);
    const LuDeterminant d = lu_determinant(minor);
    if (d.singular)
      throw SingularSubmatrix("minor D_" + std::to_string(j + 1) + " vanishes");
    const Vector uj = lu_solve(minor, rhs);
    const double wj = std::abs(d.value);
    for (std::size_t k = 0; k < r; ++k) u[k] += wj * uj[k];
    weight_sum += wj;
    // (-1)^(j+1) for the 1-based index j+1.
    alternating += (j % 2 == 0 ? -1.0 : 1.0) * d.value * a_hat[j];
  }
  for (double& x : u) x /= weight_sum;
  return {std::move(u), std::abs(alternating) / weight_sum};
}

Vector replacement_errors(const CompleteQR& qr, std::span<const double> a_hat,
                          std::span<const double> h, double xi, Degeneracy policy) {
  const std::size_t r = qr.rank();
  const std::size_t m = r + 1;
  if (a_hat.size() != m || h.size() != r)
    throw InvalidArgument("replacement dimension mismatch");

  const Vector g = solve_upper_triangular_transposed(qr.upper, h);
  Vector y(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    auto oi = qr.orth.row(i);
    double t = 0.0;
    for (std::size_t k = 0; k < r; ++k) t += oi[k] * g[k];
    y[i] = t;
  }
  const double y_inf = max_abs(y);

  Vector mu(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double qk = qr.q_comp(k);
    const double yk = y[k];
    double num = 0.0;
    double l1 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double qi = qk * ((i == k ? 1.0 : 0.0) - y[i]) + yk * qr.q_comp(i);
      num += qi * (i == k ? xi : a_hat[i]);
      l1 += std::abs(qi);
    }
    const double scale = std::abs(qk) * (1.0 + y_inf) + std::abs(yk);
    if (!(l1 > 1e-14 * scale)) {
      if (policy == Degeneracy::Reject)
        throw DegenerateComplement("candidate null vector vanishes at position " +
                                   std::to_string(k));
      mu[k] = -1.0;
      continue;
    }
    mu[k] = std::abs(num) / l1;
  }
  return mu;
}

Replacement best_replacement(const CompleteQR& qr, std::span<const double> a_hat,
                             std::span<const double> h, double xi, Degeneracy policy) {
  const Vector mu = replacement_errors(qr, a_hat, h, xi, policy);
  Replacement best{0, -1.0};
  for (std::size_t k = 0; k < mu.size(); ++k)
    if (mu[k] > best.error) best = {k, mu[k]};
  if (best.error < 0.0) throw DegenerateComplement("no admissible replacement");
  return best;
}

UniformSolution solve_uniform(const Matrix& v, std::span<const double> a,
                              const std::optional<WorkingSet>& initial,
                              Degeneracy policy) {
  const std::size_t n = v.rows();
  const std::size_t r = v.cols();
  if (a.size() != n) throw InvalidArgument("right-hand side length mismatch");
  if (n < r + 1) throw InvalidArgument("need at least r+1 rows");

  WorkingSet set;
  CompleteQR qr;
  if (initial) {
    if (initial->size() != r + 1)
      throw InvalidArgument("initial working set must have r+1 entries");
    set = *initial;
    qr = complete_qr(v.select_rows(set.indices()));
  } else {
    std::tie(set, qr) = initial_working_set(v, a);
  }

  Vector a_hat(r + 1);
  for (std::size_t k = 0; k <= r; ++k) a_hat[k] = a[set[k]];

  UniformSolution sol;
  sol.residual.resize(n);
  const std::size_t cap = exchange_step_cap(n);
  for (std::size_t step = 0;; ++step) {
    if (policy == Degeneracy::Tolerate && has_zero_component(qr)) ++sol.degenerate_steps;
    SmallSolution small = solve_small(qr, a_hat, policy);
    sol.subset_errors.push_back(std::abs(small.c_hat));

    double w_max = 0.0;
    std::size_t j_max = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const double wj = a[j] - dot(v.row(j), small.u);
      sol.residual[j] = wj;
      if (std::abs(wj) > w_max) {
        w_max = std::abs(wj);
        j_max = j;
      }
    }
    double w_set = 0.0;
    for (std::size_t k = 0; k <= r; ++k)
      w_set = std::max(w_set, std::abs(sol.residual[set[k]]));

    sol.u = std::move(small.u);
    sol.error = w_max;
    if (w_max == 0.0 || w_max - w_set <= kTerminationTol * w_max) break;
    if (step >= cap) {
      throw IterationLimit("exchange did not terminate within " +
                           std::to_string(cap) + " steps");
    }

    const Replacement rep = best_replacement(qr, a_hat, v.row(j_max), a[j_max], policy);
    qr = qr_rank1_row_replace(qr, rep.position, v.row(j_max));
    a_hat[rep.position] = a[j_max];
    set.replace(rep.position, j_max);
    ++sol.iterations;
  }
  sol.char_set = std::move(set);
  return sol;
}

UniformSolution brute_force_uniform(const Matrix& v, std::span<const double> a) {
  const std::size_t n = v.rows();
  const std::size_t r = v.cols();
  if (a.size() != n) throw InvalidArgument("right-hand side length mismatch");
  if (n > 14 || r > 4) throw SizeLimit("enumeration oracle limited to n <= 14, r <= 4");
  if (n < r + 1) throw InvalidArgument("need at least r+1 rows");

  std::vector<std::size_t> c = detail::first_combination(r + 1);
  Vector a_hat(r + 1);
  DirectSolution best{{}, -1.0};
  std::vector<std::size_t> best_set;
  do {
    for (std::size_t k = 0; k <= r; ++k) a_hat[k] = a[c[k]];
    DirectSolution s = dzyadyk_direct(v.select_rows(c), a_hat);
    if (s.error > best.error) {
      best = std::move(s);
      best_set = c;
    }
  } while (detail::next_combination(c, n));

  UniformSolution sol;
  sol.u = best.u;
  sol.error = best.error;
  sol.residual.resize(n);
  for (std::size_t j = 0; j < n; ++j) sol.residual[j] = a[j] - dot(v.row(j), sol.u);
  sol.char_set = WorkingSet(best_set, n);
  sol.subset_errors = {best.error};
  return sol;
}

}  // namespace cheblr
