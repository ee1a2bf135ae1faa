#include "cheblr/alternance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cheblr/detail/combinations.hpp"
#include "cheblr/errors.hpp"
#include "cheblr/linalg.hpp"
#include "cheblr/matrix_io.hpp"

namespace cheblr {
namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
constexpr std::size_t kExplicitDetMaxRank = 8;

void check_dims(const Matrix& a, const Matrix& u, const Matrix& v) {
  if (u.rows() != a.rows() || v.rows() != a.cols() || u.cols() != v.cols())
    throw InvalidArgument("factor dimensions do not match A (" +
                          std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                          ", U " + std::to_string(u.rows()) + "x" +
                          std::to_string(u.cols()) + ", V " + std::to_string(v.rows()) +
                          "x" + std::to_string(v.cols()) + ")");
}

Matrix residual_matrix(const Matrix& a, const Matrix& u, const Matrix& v, bool parallel) {
  const std::size_t m = a.rows(), n = a.cols(), r = u.cols();
  Matrix g(m, n);
  auto fill_row = [&](std::size_t i) {
    auto ui = u.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      auto vj = v.row(j);
      double s = 0.0;
      for (std::size_t k = 0; k < r; ++k) s += ui[k] * vj[k];
      g(i, j) = a(i, j) - s;
    }
  };
  if (parallel) {
    const auto rows = static_cast<std::ptrdiff_t>(m);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < rows; ++i) fill_row(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < m; ++i) fill_row(i);
  }
  return g;
}

ExtremeSet extreme_from_residual(const Matrix& g, double tol) {
  if (!(tol >= 0.0 && tol < 1.0)) throw InvalidArgument("tolerance must lie in [0, 1)");
  ExtremeSet s;
  s.m = g.rows();
  s.n = g.cols();
  s.tol = tol;
  s.max_err = g.max_abs();
  if (s.max_err == 0.0) return s;
  const double thr = (1.0 - tol) * s.max_err;
  std::vector<char> col_hit(s.n, 0);
  for (std::size_t i = 0; i < s.m; ++i) {
    bool row_hit = false;
    for (std::size_t j = 0; j < s.n; ++j) {
      const double x = g(i, j);
      if (std::abs(x) >= thr) {
        s.entries.push_back({i, j, sign_of(x)});
        row_hit = true;
        col_hit[j] = 1;
      }
    }
    if (row_hit) s.rows.push_back(i);
  }
  for (std::size_t j = 0; j < s.n; ++j)
    if (col_hit[j]) s.cols.push_back(j);
  return s;
}

ExtremeSet extreme_set_impl(const Matrix& a, const Matrix& u, const Matrix& v,
                            double tol, bool parallel) {
  check_dims(a, u, v);
  return extreme_from_residual(residual_matrix(a, u, v, parallel), tol);
}

bool alternates(std::span<const int> s) {
  for (std::size_t k = 0; k + 1 < s.size(); ++k)
    if (s[k] * s[k + 1] >= 0) return false;
  return true;
}

// Witness search along one line (a row of G against V, or a column of G
// against U). `cand` holds the positions still in the certified set.
struct LineCoverage {
  std::vector<std::size_t> witness_of;  // per candidate, index into sets or kNone
  std::vector<std::vector<std::size_t>> sets;
  std::vector<std::vector<int>> signs;
  bool truncated = false;
  std::size_t degenerate = 0;
};

LineCoverage cover_line(const Matrix& basis, const std::vector<double>& line,
                        const std::vector<std::size_t>& cand, std::size_t r) {
  LineCoverage cov;
  cov.witness_of.assign(cand.size(), kNone);
  const std::size_t k = r + 1;
  if (cand.size() < k) return cov;

  std::size_t uncovered = cand.size();
  std::size_t budget = kWitnessBudget;
  std::vector<std::size_t> c = detail::first_combination(k);
  std::vector<std::size_t> idx(k);
  std::vector<int> t(k);
  do {
    if (budget-- == 0) {
      cov.truncated = true;
      break;
    }
    bool adds = false;
    for (std::size_t p : c) adds = adds || cov.witness_of[p] == kNone;
    if (!adds) continue;
    for (std::size_t q = 0; q < k; ++q) idx[q] = cand[c[q]];
    const std::vector<int> d = subset_minor_signs(basis, idx);
    if (d.empty()) {
      ++cov.degenerate;
      continue;
    }
    for (std::size_t q = 0; q < k; ++q) t[q] = sign_of(line[idx[q]]) * d[q];
    if (!alternates(t)) continue;
    const std::size_t id = cov.sets.size();
    cov.sets.push_back(idx);
    cov.signs.push_back(t);
    for (std::size_t p : c) {
      if (cov.witness_of[p] == kNone) {
        cov.witness_of[p] = id;
        --uncovered;
      }
    }
  } while (uncovered > 0 && detail::next_combination(c, cand.size()));
  return cov;
}

AlternanceReport alternance_impl(const Matrix& a, const Matrix& u, const Matrix& v,
                                 double tol, bool parallel) {
  check_dims(a, u, v);
  const std::size_t m = a.rows(), n = a.cols(), r = u.cols();
  const Matrix g = residual_matrix(a, u, v, parallel);

  AlternanceReport rep;
  rep.extreme = extreme_from_residual(g, tol);
  rep.tol = tol;
  rep.rank = r;
  if (rep.extreme.max_err == 0.0) {
    rep.pass = true;
    rep.zero_residual = true;
    rep.note = "zero residual: the extreme set is empty by convention";
    return rep;
  }

  {
    std::vector<std::size_t> row_count(m, 0), col_count(n, 0);
    for (const ExtremeEntry& e : rep.extreme.entries) {
      ++row_count[e.i];
      ++col_count[e.j];
    }
    for (std::size_t i : rep.extreme.rows)
      if (row_count[i] < r + 1) rep.deficient_rows.push_back(i);
    for (std::size_t j : rep.extreme.cols)
      if (col_count[j] < r + 1) rep.deficient_cols.push_back(j);
  }

  std::vector<char> in_set(m * n, 0);
  for (const ExtremeEntry& e : rep.extreme.entries) in_set[e.i * n + e.j] = 1;
  std::size_t live = rep.extreme.entries.size();

  std::vector<std::vector<std::size_t>> row_cand(m), col_cand(n);
  std::vector<LineCoverage> row_cov(m), col_cov(n);

  auto run = [&](std::size_t count, auto&& body) {
    if (parallel) {
      const auto c = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(dynamic, 1)
      for (std::ptrdiff_t x = 0; x < c; ++x) body(static_cast<std::size_t>(x));
    } else {
      for (std::size_t x = 0; x < count; ++x) body(x);
    }
  };

  for (;;) {
    ++rep.rounds;
    run(m, [&](std::size_t i) {
      row_cand[i].clear();
      for (std::size_t j = 0; j < n; ++j)
        if (in_set[i * n + j]) row_cand[i].push_back(j);
      std::vector<double> line(g.row(i).begin(), g.row(i).end());
      row_cov[i] = cover_line(v, line, row_cand[i], r);
    });
    run(n, [&](std::size_t j) {
      col_cand[j].clear();
      for (std::size_t i = 0; i < m; ++i)
        if (in_set[i * n + j]) col_cand[j].push_back(i);
      col_cov[j] = cover_line(u, g.col(j), col_cand[j], r);
    });

    std::vector<char> row_ok(m * n, 0), col_ok(m * n, 0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t p = 0; p < row_cand[i].size(); ++p)
        if (row_cov[i].witness_of[p] != kNone) row_ok[i * n + row_cand[i][p]] = 1;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t p = 0; p < col_cand[j].size(); ++p)
        if (col_cov[j].witness_of[p] != kNone) col_ok[col_cand[j][p] * n + j] = 1;

    std::size_t removed = 0;
    for (std::size_t c = 0; c < m * n; ++c) {
      if (in_set[c] && !(row_ok[c] && col_ok[c])) {
        in_set[c] = 0;
        ++removed;
      }
    }
    live -= removed;
    rep.removed_cells += removed;
    if (removed == 0 || live == 0) break;
  }

  for (std::size_t i = 0; i < m; ++i) {
    rep.truncated = rep.truncated || row_cov[i].truncated;
    rep.degenerate_subsets += row_cov[i].degenerate;
  }
  for (std::size_t j = 0; j < n; ++j) {
    rep.truncated = rep.truncated || col_cov[j].truncated;
    rep.degenerate_subsets += col_cov[j].degenerate;
  }

  if (live > 0) {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t p = 0; p < row_cand[i].size(); ++p) {
        const std::size_t j = row_cand[i][p];
        const auto& cc = col_cand[j];
        const std::size_t q = static_cast<std::size_t>(
            std::lower_bound(cc.begin(), cc.end(), i) - cc.begin());
        const std::size_t rw = row_cov[i].witness_of[p];
        const std::size_t cw = col_cov[j].witness_of[q];
        rep.certified.push_back({i, j, sign_of(g(i, j))});
        rep.witnesses.push_back({i, j, row_cov[i].sets[rw], row_cov[i].signs[rw],
                                 col_cov[j].sets[cw], col_cov[j].signs[cw]});
      }
    }
  }
  rep.pass = !rep.certified.empty();

  if (rep.truncated)
    rep.note = "witness search budget exhausted on some line; a fail may be spurious";
  else if (!rep.pass && !rep.deficient_rows.empty())
    rep.note = "some extreme rows carry fewer than r+1 extreme cells";
  else if (!rep.pass && !rep.deficient_cols.empty())
    rep.note = "some extreme columns carry fewer than r+1 extreme cells";
  return rep;
}

}  // namespace

std::vector<int> subset_minor_signs(const Matrix& basis,
                                    std::span<const std::size_t> idx) {
  const Matrix sub = basis.select_rows(idx);
  if (basis.cols() <= kExplicitDetMaxRank) {
    const std::size_t r = basis.cols();
    std::vector<std::size_t> keep(r);
    std::vector<int> out(r + 1);
    for (std::size_t k = 0; k <= r; ++k) {
      for (std::size_t i = 0, p = 0; i <= r; ++i)
        if (i != k) keep[p++] = i;
      const LuDeterminant d = lu_determinant(sub.select_rows(keep));
      if (d.singular) return {};
      out[k] = sign_of(d.value);
    }
    return out;
  }
  try {
    const CompleteQR qr = complete_qr(sub);
    return det_signs_from_complement(qr.q_comp());
  } catch (const SingularSubmatrix&) {
  } catch (const DegenerateComplement&) {
  }
  return {};
}

ExtremeSet compute_extreme_set(const Matrix& a, const Matrix& u, const Matrix& v,
                               double tol) {
  return extreme_set_impl(a, u, v, tol, true);
}

AlternanceReport check_2way_alternance(const Matrix& a, const Matrix& u,
                                       const Matrix& v, double tol) {
  return alternance_impl(a, u, v, tol, true);
}

namespace serial {
ExtremeSet compute_extreme_set(const Matrix& a, const Matrix& u, const Matrix& v,
                               double tol) {
  return extreme_set_impl(a, u, v, tol, false);
}
AlternanceReport check_2way_alternance(const Matrix& a, const Matrix& u,
                                       const Matrix& v, double tol) {
  return alternance_impl(a, u, v, tol, false);
}
}  // namespace serial

EquioscillationCertificate check_equioscillation(const Matrix& v,
                                                 std::span<const double> a,
                                                 std::span<const double> u,
                                                 double tol) {
  const std::size_t n = v.rows(), r = v.cols();
  if (a.size() != n || u.size() != r)
    throw InvalidArgument("dimension mismatch in equioscillation check");
  if (!(tol >= 0.0 && tol < 1.0)) throw InvalidArgument("tolerance must lie in [0, 1)");

  EquioscillationCertificate cert;
  cert.residual.resize(n);
  for (std::size_t j = 0; j < n; ++j) cert.residual[j] = a[j] - dot(v.row(j), u);
  cert.error = max_abs(cert.residual);
  if (cert.error == 0.0) {
    cert.pass = true;
    cert.zero_residual = true;
    return cert;
  }
  const double thr = (1.0 - tol) * cert.error;
  for (std::size_t j = 0; j < n; ++j)
    if (std::abs(cert.residual[j]) >= thr) cert.extreme.push_back(j);
  const std::size_t k = r + 1;
  if (cert.extreme.size() < k) return cert;

  std::size_t tried = 0;
  std::size_t budget = kWitnessBudget;
  std::vector<std::size_t> c = detail::first_combination(k);
  std::vector<std::size_t> idx(k);
  std::vector<int> t(k);
  do {
    if (budget-- == 0) {
      cert.truncated = true;
      break;
    }
    ++tried;
    for (std::size_t q = 0; q < k; ++q) idx[q] = cert.extreme[c[q]];
    const std::vector<int> d = subset_minor_signs(v, idx);
    if (d.empty()) {
      ++cert.degenerate_subsets;
      continue;
    }
    for (std::size_t q = 0; q < k; ++q) t[q] = sign_of(cert.residual[idx[q]]) * d[q];
    if (alternates(t)) {
      cert.pass = true;
      cert.witness = idx;
      cert.minor_signs = d;
      for (std::size_t q = 0; q < k; ++q)
        cert.residual_signs.push_back(sign_of(cert.residual[idx[q]]));
      return cert;
    }
  } while (detail::next_combination(c, cert.extreme.size()));

  if (tried > 0 && cert.degenerate_subsets == tried)
    throw SingularSubmatrix("every candidate witness subset has a vanishing minor");
  return cert;
}

std::string revalidate_report(const Matrix& a, const Matrix& u, const Matrix& v,
                              const AlternanceReport& report) {
  check_dims(a, u, v);
  const std::size_t n = a.cols(), r = u.cols();
  const Matrix g = residual_matrix(a, u, v, false);
  const double max_err = g.max_abs();
  const double thr = (1.0 - report.tol) * max_err;
  if (report.pass && report.zero_residual) {
    return max_err == 0.0 ? "" : "report claims a zero residual";
  }
  if (report.pass != !report.certified.empty()) return "verdict disagrees with certified set";
  if (report.witnesses.size() != report.certified.size())
    return "witness count differs from certified cell count";

  std::vector<char> in_set(a.rows() * n, 0);
  for (const ExtremeEntry& e : report.certified) {
    if (e.i >= a.rows() || e.j >= n) return "certified cell out of range";
    if (!(std::abs(g(e.i, e.j)) >= thr)) return "certified cell is not extreme";
    in_set[e.i * n + e.j] = 1;
  }

  auto recheck = [&](const Matrix& basis, std::span<const std::size_t> idx,
                     std::span<const int> signs, auto&& value,
                     auto&& cell_in_set) -> std::string {
    if (idx.size() != r + 1 || signs.size() != r + 1) return "witness has wrong size";
    if (!std::is_sorted(idx.begin(), idx.end()) ||
        std::adjacent_find(idx.begin(), idx.end()) != idx.end())
      return "witness indices not strictly increasing";
    for (std::size_t x : idx)
      if (!cell_in_set(x)) return "witness cell outside certified set";
    const std::vector<int> d = subset_minor_signs(basis, idx);
    if (d.empty()) return "witness minors degenerate";
    for (std::size_t q = 0; q <= r; ++q)
      if (sign_of(value(idx[q])) * d[q] != signs[q]) return "witness signs differ";
    if (!alternates(signs)) return "witness signs do not alternate";
    return "";
  };

  for (const AlternanceWitness& w : report.witnesses) {
    if (!std::binary_search(w.cols.begin(), w.cols.end(), w.j)) return "j not in J";
    if (!std::binary_search(w.rows.begin(), w.rows.end(), w.i)) return "i not in I";
    std::string err = recheck(
        v, w.cols, w.col_signs, [&](std::size_t j) { return g(w.i, j); },
        [&](std::size_t j) { return j < n && in_set[w.i * n + j]; });
    if (!err.empty()) return "row " + std::to_string(w.i) + ": " + err;
    err = recheck(
        u, w.rows, w.row_signs, [&](std::size_t i) { return g(i, w.j); },
        [&](std::size_t i) { return i < a.rows() && in_set[i * n + w.j]; });
    if (!err.empty()) return "column " + std::to_string(w.j) + ": " + err;
  }
  return "";
}

void export_alternance_map(const AlternanceReport& report,
                           const std::filesystem::path& path) {
  const std::size_t m = report.extreme.m, n = report.extreme.n;
  if (m == 0 || n == 0) throw InvalidArgument("report has no dimensions");
  std::vector<unsigned char> px(m * n * 3);
  for (std::size_t c = 0; c < m * n; ++c) {
    px[3 * c] = 0;
    px[3 * c + 1] = 0;
    px[3 * c + 2] = 255;
  }
  for (const ExtremeEntry& e : report.extreme.entries) {
    unsigned char* p = &px[3 * (e.i * n + e.j)];
    p[0] = 255;
    p[1] = e.sign > 0 ? 255 : 0;
    p[2] = 0;
  }
  std::string out = "P6\n" + std::to_string(n) + " " + std::to_string(m) + "\n255\n";
  out.append(px.begin(), px.end());
  write_file_atomic(path, out);
}

}  // namespace cheblr
