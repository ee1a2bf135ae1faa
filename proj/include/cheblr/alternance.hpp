#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "cheblr/matrix.hpp"

namespace cheblr {

inline constexpr double kSingleSolveTol = 1e-8;
inline constexpr double kIterativeTol = 1e-6;
/// Subsets examined per row or column before a witness search gives up.
inline constexpr std::size_t kWitnessBudget = 200000;

struct ExtremeEntry {
  std::size_t i = 0;
  std::size_t j = 0;
  int sign = 0;
  friend bool operator==(const ExtremeEntry&, const ExtremeEntry&) = default;
};

/// Cells of G = A - U V^T with |g_ij| >= (1 - tol) ||G||_C, in row-major
/// order. Empty when G vanishes.
struct ExtremeSet {
  std::vector<ExtremeEntry> entries;
  std::vector<std::size_t> rows;  // projection on row indices, ascending
  std::vector<std::size_t> cols;  // projection on column indices, ascending
  double max_err = 0.0;
  double tol = 0.0;
  std::size_t m = 0;
  std::size_t n = 0;
};

ExtremeSet compute_extreme_set(const Matrix& a, const Matrix& u, const Matrix& v,
                               double tol);

namespace serial {
ExtremeSet compute_extreme_set(const Matrix& a, const Matrix& u, const Matrix& v,
                               double tol);
}  // namespace serial

/// Signs of D_1..D_{r+1} of basis(idx), or empty if some minor (or the
/// complement) is numerically zero. Uses explicit determinants for r <= 8 and
/// the complete-QR complement beyond (then correct up to one global sign).
std::vector<int> subset_minor_signs(const Matrix& basis,
                                    std::span<const std::size_t> idx);

struct EquioscillationCertificate {
  bool pass = false;
  bool zero_residual = false;
  /// Budget ran out before every candidate subset was tried.
  bool truncated = false;
  double error = 0.0;
  Vector residual;
  std::vector<std::size_t> extreme;  // indices with |w_j| >= (1 - tol) error
  std::vector<std::size_t> witness;  // r+1 ascending indices on pass
  std::vector<int> residual_signs;   // sign(w_{j_k})
  std::vector<int> minor_signs;      // sign(Delta_k)
  std::size_t degenerate_subsets = 0;
};

/// Searches the extreme indices of w = a - V u for r+1 of them whose
/// w_{j_k} Delta_k alternate in sign. Throws SingularSubmatrix if no witness
/// exists and every candidate subset was degenerate.
EquioscillationCertificate check_equioscillation(const Matrix& v,
                                                 std::span<const double> a,
                                                 std::span<const double> u,
                                                 double tol = kSingleSolveTol);

struct AlternanceWitness {
  std::size_t i = 0;
  std::size_t j = 0;
  std::vector<std::size_t> cols;  // J, ascending, contains j
  std::vector<int> col_signs;     // sign(g_{i j_k} D_k(V(J)))
  std::vector<std::size_t> rows;  // I, ascending, contains i
  std::vector<int> row_signs;     // sign(g_{i_k j} D_k(U(I)))
};

struct AlternanceReport {
  ExtremeSet extreme;
  std::vector<ExtremeEntry> certified;  // greedy fixpoint, row-major order
  std::vector<AlternanceWitness> witnesses;  // one per certified cell
  bool pass = false;
  bool zero_residual = false;
  bool truncated = false;
  double tol = 0.0;
  std::size_t rank = 0;
  std::size_t rounds = 0;
  std::size_t removed_cells = 0;
  std::size_t degenerate_subsets = 0;
  /// Rows/columns touching the extreme set with fewer than r+1 extreme cells.
  std::vector<std::size_t> deficient_rows;
  std::vector<std::size_t> deficient_cols;
  std::string note;
};

/// Starts from the whole extreme set and repeatedly drops cells lacking a row
/// or column witness inside the current set; passes if the fixpoint is
/// nonempty. A zero residual passes with an empty set.
AlternanceReport check_2way_alternance(const Matrix& a, const Matrix& u,
                                       const Matrix& v, double tol = kIterativeTol);

namespace serial {
AlternanceReport check_2way_alternance(const Matrix& a, const Matrix& u,
                                       const Matrix& v, double tol = kIterativeTol);
}  // namespace serial

/// Recomputes every recorded witness from the raw factors. Returns an empty
/// string if the report checks out, else a description of the first mismatch.
std::string revalidate_report(const Matrix& a, const Matrix& u, const Matrix& v,
                              const AlternanceReport& report);

/// Binary PPM (P6): blue off the extreme set, yellow for positive extreme
/// cells, red for negative ones. Throws IoError.
void export_alternance_map(const AlternanceReport& report,
                           const std::filesystem::path& path);

}  // namespace cheblr
