#include "cheblr/altmin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cheblr/errors.hpp"
#include "cheblr/rng.hpp"

namespace cheblr {
namespace {

struct LineOutcome {
  UniformSolution sol;
  bool cold_restart = false;
};

LineOutcome solve_line(const Matrix& basis, std::span<const double> rhs,
                       const WorkingSet* warm) {
  if (warm) {
    try {
      return {solve_uniform(basis, rhs, *warm, Degeneracy::Tolerate), false};
    } catch (const Error&) {
      // The previous characteristic set can go singular for the new basis.
    }
    return {solve_uniform(basis, rhs, std::nullopt, Degeneracy::Tolerate), true};
  }
  return {solve_uniform(basis, rhs, std::nullopt, Degeneracy::Tolerate), false};
}

struct Failure {
  std::size_t line = std::numeric_limits<std::size_t>::max();
  ErrorCode code = ErrorCode::InvalidArgument;
  std::string what;
};

void validate(const Matrix& a, std::size_t rank, const AltMinOptions& opts) {
  const std::size_t m = a.rows(), n = a.cols();
  if (m < 2 || n < 2) throw InvalidArgument("matrix dimensions must exceed 1");
  if (rank < 1 || rank >= std::min(m, n))
    throw InvalidArgument("rank must satisfy 1 <= r < min(m, n)");
  if (opts.max_iter == 0) throw InvalidArgument("max_iter must be positive");
  if (opts.window == 0) throw InvalidArgument("window must be positive");
}

}  // namespace

LineSolveResult solve_lines(const Matrix& rhs, const Matrix& basis,
                            const std::vector<WorkingSet>& warm, bool parallel) {
  const std::size_t lines = rhs.rows();
  const std::size_t r = basis.cols();
  if (rhs.cols() != basis.rows())
    throw InvalidArgument("right-hand side length " + std::to_string(rhs.cols()) +
                          " does not match basis rows " + std::to_string(basis.rows()));
  if (!warm.empty() && warm.size() != lines)
    throw InvalidArgument("warm-start set count does not match line count");

  LineSolveResult out{Matrix(lines, r), Vector(lines, 0.0),
                      std::vector<WorkingSet>(lines), 0};
  std::vector<Failure> failures(lines);
  std::vector<char> failed(lines, 0), restarted(lines, 0), degenerate(lines, 0);

  auto body = [&](std::size_t i) {
    try {
      const WorkingSet* w = warm.empty() ? nullptr : &warm[i];
      LineOutcome res = solve_line(basis, rhs.row(i), w);
      for (std::size_t k = 0; k < r; ++k) out.factor(i, k) = res.sol.u[k];
      out.errors[i] = res.sol.error;
      out.sets[i] = std::move(res.sol.char_set);
      restarted[i] = res.cold_restart ? 1 : 0;
      degenerate[i] = res.sol.degenerate_steps > 0 ? 1 : 0;
    } catch (const Error& e) {
      failed[i] = 1;
      failures[i] = {i, e.code(), e.what()};
    }
  };

  if (parallel) {
    const auto n = static_cast<std::ptrdiff_t>(lines);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) body(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < lines; ++i) body(i);
  }

  for (std::size_t i = 0; i < lines; ++i)
    if (failed[i]) throw LineSolveFailure(i, failures[i].code, failures[i].what);
  for (char c : restarted) out.cold_restarts += static_cast<std::size_t>(c);
  for (char c : degenerate) out.degenerate_lines += static_cast<std::size_t>(c);
  return out;
}

Matrix phi(const Matrix& a, const Matrix& v) { return solve_lines(a, v, {}, true).factor; }

Matrix psi(const Matrix& a, const Matrix& u) {
  return solve_lines(a.transpose(), u, {}, true).factor;
}

namespace serial {
Matrix phi(const Matrix& a, const Matrix& v) { return solve_lines(a, v, {}, false).factor; }
Matrix psi(const Matrix& a, const Matrix& u) {
  return solve_lines(a.transpose(), u, {}, false).factor;
}
}  // namespace serial

FactorPair alternating_minimization(const Matrix& a, std::size_t rank,
                                    const std::optional<Matrix>& v0,
                                    const AltMinOptions& opts) {
  validate(a, rank, opts);
  const std::size_t m = a.rows(), n = a.cols();

  FactorPair fp;
  fp.seed = opts.seed;
  if (v0) {
    if (v0->rows() != n || v0->cols() != rank)
      throw InvalidArgument("initial V must be n x r");
    fp.v = *v0;
  } else {
    Rng rng(opts.seed);
    fp.v = gaussian_matrix(n, rank, rng);
  }
  fp.u = Matrix(m, rank);

  const Matrix at = a.transpose();
  const double a_scale = a.max_abs();
  std::vector<WorkingSet> row_sets, col_sets;

  for (std::size_t t = 1; t <= opts.max_iter; ++t) {
    const char* axis = "row";
    try {
      LineSolveResult rows = solve_lines(a, fp.v, row_sets, true);
      const double before = *std::max_element(rows.errors.begin(), rows.errors.end());
      axis = "column";
      LineSolveResult cols = solve_lines(at, rows.factor, col_sets, true);
      const double after = *std::max_element(cols.errors.begin(), cols.errors.end());

      fp.u = std::move(rows.factor);
      fp.v = std::move(cols.factor);
      fp.cold_restarts += rows.cold_restarts + cols.cold_restarts;
      fp.degenerate_solves += rows.degenerate_lines + cols.degenerate_lines;
      if (opts.warm_start) {
        row_sets = std::move(rows.sets);
        col_sets = std::move(cols.sets);
      }
      fp.half_trace.push_back(before);
      fp.trace.push_back(after);
      fp.iterations = t;
      if (opts.observer) opts.observer(IterateView{t, fp.u, fp.v, before, after});
    } catch (const LineSolveFailure& e) {
      throw NonChebyshevIterate("iteration " + std::to_string(t) + ", " + axis + " " +
                                std::to_string(e.line()) + " (" + to_string(e.cause()) +
                                "): " + e.what());
    }

    if (opts.renormalize) {
      const double nu = fp.u.max_abs(), nv = fp.v.max_abs();
      if (nu > 0.0 && nv > 0.0) {
        const double c = std::sqrt(nu * nv);
        fp.u *= c / nu;
        fp.v *= c / nv;
      }
    }

    const double err = fp.trace.back();
    if (err <= 1e-14 * a_scale) {
      fp.converged = true;
      break;
    }
    if (t > opts.window) {
      const double old = fp.trace[t - 1 - opts.window];
      if (old - err <= opts.rel_tol * old) {
        fp.converged = true;
        break;
      }
    }
  }
  fp.cheb_error = fp.trace.back();
  return fp;
}

MultiRestartResult multi_restart(const Matrix& a, std::size_t rank,
                                 std::size_t n_restarts, std::uint64_t seed,
                                 const AltMinOptions& opts) {
  if (n_restarts < 1) throw InvalidArgument("n_restarts must be at least 1");
  validate(a, rank, opts);

  std::vector<std::optional<FactorPair>> pairs(n_restarts);
  MultiRestartResult res;
  res.runs.resize(n_restarts);

  const auto count = static_cast<std::ptrdiff_t>(n_restarts);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    const auto i = static_cast<std::size_t>(k);
    AltMinOptions o = opts;
    o.seed = derive_seed(seed, i);
    // The observer is not required to be thread safe.
    o.observer = nullptr;
    RestartRecord& rec = res.runs[i];
    rec.index = i;
    rec.seed = o.seed;
    try {
      pairs[i] = alternating_minimization(a, rank, std::nullopt, o);
      rec.ok = true;
      rec.error = pairs[i]->cheb_error;
      rec.iterations = pairs[i]->iterations;
      rec.converged = pairs[i]->converged;
    } catch (const Error& e) {
      rec.failure = e.what();
    }
  }

  Vector errors;
  bool found = false;
  for (std::size_t i = 0; i < n_restarts; ++i) {
    const RestartRecord& rec = res.runs[i];
    if (!rec.ok) {
      ++res.failures;
      continue;
    }
    errors.push_back(rec.error);
    if (!found || rec.error < res.best.cheb_error) {
      res.best = std::move(*pairs[i]);
      res.best_index = i;
      found = true;
    }
  }
  if (!found)
    throw AllRestartsFailed("all " + std::to_string(n_restarts) +
                            " restarts failed; first: " + res.runs[0].failure);

  std::sort(errors.begin(), errors.end());
  res.min_error = errors.front();
  res.max_error = errors.back();
  const std::size_t h = errors.size() / 2;
  res.median_error = errors.size() % 2 ? errors[h] : 0.5 * (errors[h - 1] + errors[h]);
  return res;
}

}  // namespace cheblr
