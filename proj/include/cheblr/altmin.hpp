#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cheblr/matrix.hpp"
#include "cheblr/uniform.hpp"

namespace cheblr {

/// Snapshot handed to AltMinOptions::observer after every iteration, before
/// renormalization is applied.
struct IterateView {
  std::size_t iteration;     // 1-based
  const Matrix& u;           // U^(t) = phi(A, V^(t-1))
  const Matrix& v;           // V^(t) = psi(A, U^(t))
  double error_before;       // ||A - U^(t) V^(t-1)^T||_C
  double error_after;        // ||A - U^(t) V^(t)^T||_C
};

struct AltMinOptions {
  std::size_t max_iter = 200;
  /// Stop once the error improved by less than rel_tol (relative) over the
  /// last `window` iterations.
  double rel_tol = 1e-6;
  std::size_t window = 5;
  std::uint64_t seed = 0;
  /// Rescale both factors to equal Chebyshev norms after every iteration.
  bool renormalize = true;
  /// Start each row/column solve from its previous characteristic set.
  bool warm_start = true;
  std::function<void(const IterateView&)> observer;
};

struct FactorPair {
  Matrix u;
  Matrix v;
  double cheb_error = 0.0;
  /// ||A - U^(t) V^(t)^T||_C after each iteration.
  Vector trace;
  /// ||A - U^(t) V^(t-1)^T||_C after each phi half-step.
  Vector half_trace;
  std::size_t iterations = 0;
  bool converged = false;
  std::uint64_t seed = 0;
  /// Warm-started solves that had to be redone from a cold start.
  std::size_t cold_restarts = 0;
  /// Line solves whose basis had a vanishing r x r minor in some working set
  /// (the factor from the previous half-step was not Chebyshev).
  std::size_t degenerate_solves = 0;
};

/// Row i of the result minimizes ||a^i - V x||_inf. Rows are solved in
/// parallel; a failing row surfaces as LineSolveFailure carrying its index
/// (the smallest failing index if several fail).
Matrix phi(const Matrix& a, const Matrix& v);

/// Column-wise mirror of phi: row j of the result minimizes ||a_j - U x||_inf.
Matrix psi(const Matrix& a, const Matrix& u);

/// Sequential reference implementations; results are bitwise identical to
/// the parallel ones.
namespace serial {
Matrix phi(const Matrix& a, const Matrix& v);
Matrix psi(const Matrix& a, const Matrix& u);
}  // namespace serial

/// Per-line solver state reused across iterations.
struct LineSolveResult {
  Matrix factor;
  Vector errors;
  std::vector<WorkingSet> sets;
  std::size_t cold_restarts = 0;
  std::size_t degenerate_lines = 0;
};

/// Solves min_x ||rhs.row(i) - basis x||_inf for every row i of `rhs`.
/// `warm` (if non-empty) provides a starting working set per line. Degenerate
/// working sets are tolerated (see Degeneracy::Tolerate).
LineSolveResult solve_lines(const Matrix& rhs, const Matrix& basis,
                            const std::vector<WorkingSet>& warm, bool parallel);

/// Alternates U = phi(A, V), V = psi(A, U) from v0 (i.i.d. standard normal
/// from opts.seed if absent). Throws NonChebyshevIterate if a row or column
/// solve fails.
FactorPair alternating_minimization(const Matrix& a, std::size_t rank,
                                    const std::optional<Matrix>& v0 = {},
                                    const AltMinOptions& opts = {});

struct RestartRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  double error = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::string failure;
};

struct MultiRestartResult {
  FactorPair best;
  std::size_t best_index = 0;
  std::vector<RestartRecord> runs;
  double min_error = 0.0;
  double median_error = 0.0;
  double max_error = 0.0;
  std::size_t failures = 0;
};

/// Runs alternating_minimization from independent Gaussian starts; restart i
/// uses seed derive_seed(seed, i). Throws AllRestartsFailed only if every
/// restart fails.
MultiRestartResult multi_restart(const Matrix& a, std::size_t rank,
                                 std::size_t n_restarts, std::uint64_t seed,
                                 const AltMinOptions& opts = {});

}  // namespace cheblr
