#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "cheblr/linalg.hpp"
#include "cheblr/matrix.hpp"

namespace cheblr {

/// Ordered set of r+1 distinct row indices (0-based). Position matters: the
/// k-th entry is the row held in row k of the working submatrix.
class WorkingSet {
 public:
  WorkingSet() = default;
  /// Throws InvalidArgument unless the indices are distinct and < n.
  WorkingSet(std::vector<std::size_t> indices, std::size_t n);

  std::size_t size() const noexcept { return indices_.size(); }
  std::size_t operator[](std::size_t k) const noexcept { return indices_[k]; }
  std::span<const std::size_t> indices() const noexcept { return indices_; }
  bool contains(std::size_t j) const noexcept;
  void replace(std::size_t position, std::size_t index);

  /// Indices sorted ascending (the characteristic set as a plain set).
  std::vector<std::size_t> sorted() const;

  friend bool operator==(const WorkingSet&, const WorkingSet&) = default;

 private:
  std::vector<std::size_t> indices_;
};

/// How the exchange treats a working submatrix of full column rank whose
/// complement has zero entries (some r x r minor vanishes).
enum class Degeneracy {
  /// Throw DegenerateComplement.
  Reject,
  /// Pin the residual to zero at those rows and skip replacements that would
  /// make the working submatrix rank deficient.
  Tolerate,
};

struct UniformSolution {
  Vector u;
  Vector residual;  // a - V u
  double error = 0.0;
  WorkingSet char_set;
  std::size_t iterations = 0;
  /// Subset error of the working set at every step, starting with the
  /// initial set; strictly increasing in exact arithmetic.
  Vector subset_errors;
  /// Steps whose working set had a zero complement entry (Tolerate only).
  std::size_t degenerate_steps = 0;
};

struct SmallSolution {
  Vector u;
  double c_hat = 0.0;  // signed level; |c_hat| is the minimal error
};

/// Best uniform approximation for an (r+1) x r system from its complete QR
/// in O(r^2): the optimal residual is c * sign(q'), c = a^T q' / ||q'||_1.
SmallSolution solve_small(const CompleteQR& qr, std::span<const double> a_hat,
                          Degeneracy policy = Degeneracy::Reject);

/// |q^T a| / ||q||_1 for a nonzero null vector q of V^T.
double min_error_of_subset(std::span<const double> q_comp,
                           std::span<const double> a_hat);

struct DirectSolution {
  Vector u;
  double error = 0.0;
};

/// Closed form of the (r+1) x r problem as the |D_j|-weighted average of the
/// r+1 interpolating solutions. Oracle-grade: r <= 8 (SizeLimit otherwise).
DirectSolution dzyadyk_direct(const Matrix& v_hat, std::span<const double> a_hat);

struct Replacement {
  std::size_t position = 0;  // 0-based row of the working submatrix
  double error = 0.0;
};

/// Subset error after swapping row k of the working submatrix for (h, xi),
/// for every k, from one precomputed y = Q R^{-T} h: the swapped system's null
/// vector is q'_k (e_k - y) + y_k q'. O(r^2) in total.
/// Under Tolerate, positions whose swap leaves no usable null vector get -1.
Vector replacement_errors(const CompleteQR& qr, std::span<const double> a_hat,
                          std::span<const double> h, double xi,
                          Degeneracy policy = Degeneracy::Reject);

/// Chooses which row of the working submatrix to swap for the candidate row
/// `h` (right-hand side `xi`) so the subset error is largest. Smallest
/// position wins ties.
Replacement best_replacement(const CompleteQR& qr, std::span<const double> a_hat,
                             std::span<const double> h, double xi,
                             Degeneracy policy = Degeneracy::Reject);

/// Starting working set for solve_uniform: the r+1 rows with the largest
/// |a_j| if they factor cleanly, else a greedy volume-maximizing selection,
/// else up to 32 seeded random draws. Throws SingularSubmatrix if all fail.
std::pair<WorkingSet, CompleteQR> initial_working_set(const Matrix& v,
                                                      std::span<const double> a);

/// Exchange loop for min_u ||a - V u||_inf over a Chebyshev n x r matrix.
/// `initial` seeds the working set; otherwise the r+1 largest |a_j| are tried
/// first, then a greedy volume selection, then seeded random draws.
UniformSolution solve_uniform(const Matrix& v, std::span<const double> a,
                              const std::optional<WorkingSet>& initial = {},
                              Degeneracy policy = Degeneracy::Reject);

/// Exhaustive oracle over every (r+1)-row subset; n <= 14, r <= 4.
UniformSolution brute_force_uniform(const Matrix& v, std::span<const double> a);

/// Maximum exchange steps allowed for a problem with n rows.
inline constexpr std::size_t exchange_step_cap(std::size_t n) { return 10 * n; }

}  // namespace cheblr
