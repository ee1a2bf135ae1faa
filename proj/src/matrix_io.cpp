#include "cheblr/matrix_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>
#include <vector>

#include "cheblr/errors.hpp"

namespace cheblr {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string format_double(double x) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", x);
  return std::string(buf, static_cast<std::size_t>(len));
}

// Parses a whole token as a finite double.
bool parse_double(std::string_view tok, double& out) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  const char* first = tok.data();
  const char* last = first + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return !tok.empty() && ec == std::errc() && ptr == last && std::isfinite(out);
}

bool is_blank(char c) { return c == ' ' || c == '\t'; }

}  // namespace

MatrixFormat format_from_path(const std::filesystem::path& path) {
  return lower(path.extension().string()) == ".csv" ? MatrixFormat::Csv
                                                     : MatrixFormat::MatrixMarket;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed for " + path.string());
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move output into place at " + path.string());
  }
}

Matrix parse_matrix_market(const std::string& text) {
  if (text.empty()) throw ParseError("empty input", 0);
  std::size_t pos = 0;
  auto next_line = [&](std::size_t& start) -> std::string_view {
    start = pos;
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    pos = end < text.size() ? end + 1 : end;
    std::string_view line(text.data() + start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
  };

  std::size_t start = 0;
  const std::string header = lower(std::string(next_line(start)));
  std::istringstream hs(header);
  std::string banner, object, layout, field, symmetry;
  hs >> banner >> object >> layout >> field >> symmetry;
  if (banner != "%%matrixmarket" || object != "matrix")
    throw ParseError("missing %%MatrixMarket matrix header", 0);
  if (layout != "array" || field != "real" || symmetry != "general")
    throw ParseError("only 'array real general' is supported", 0);

  std::string_view line;
  do {
    if (pos >= text.size()) throw ParseError("missing size line", text.size());
    line = next_line(start);
  } while (line.empty() || line.front() == '%' ||
           std::all_of(line.begin(), line.end(), is_blank));

  std::size_t rows = 0, cols = 0;
  {
    std::istringstream ls{std::string(line)};
    std::string extra;
    if (!(ls >> rows >> cols) || (ls >> extra) || rows == 0 || cols == 0)
      throw ParseError("bad size line", start);
  }

  std::vector<double> col_major;
  col_major.reserve(rows * cols);
  while (pos < text.size()) {
    std::size_t i = pos;
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i >= text.size()) break;
    if (text[i] == '%') {
      pos = i;
      next_line(start);
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    double x = 0.0;
    if (!parse_double(std::string_view(text.data() + i, j - i), x))
      throw ParseError("bad value", i);
    if (col_major.size() == rows * cols) throw ParseError("too many values", i);
    col_major.push_back(x);
    pos = j;
  }
  if (col_major.size() != rows * cols)
    throw ParseError("expected " + std::to_string(rows * cols) + " values, found " +
                         std::to_string(col_major.size()),
                     text.size());

  Matrix m(rows, cols);
  for (std::size_t j = 0; j < cols; ++j)
    for (std::size_t i = 0; i < rows; ++i) m(i, j) = col_major[j * rows + i];
  return m;
}

Matrix parse_csv(const std::string& text) {
  std::vector<double> data;
  std::size_t cols = 0, rows = 0;
  std::size_t pos = 0;
  const std::size_t n = text.size();

  while (pos < n) {
    const std::size_t row_start = pos;
    // A trailing line break (or blank final line) ends the input.
    if (text[pos] == '\n' || (text[pos] == '\r' && pos + 1 < n && text[pos + 1] == '\n')) {
      const std::size_t after = pos + (text[pos] == '\r' ? 2 : 1);
      if (after >= n) break;
      throw ParseError("empty record", row_start);
    }
    std::size_t fields = 0;
    for (;;) {
      std::string field;
      const std::size_t field_start = pos;
      if (pos < n && text[pos] == '"') {
        ++pos;
        for (;;) {
          if (pos >= n) throw ParseError("unterminated quoted field", field_start);
          if (text[pos] == '"') {
            if (pos + 1 < n && text[pos + 1] == '"') {
              field.push_back('"');
              pos += 2;
            } else {
              ++pos;
              break;
            }
          } else {
            field.push_back(text[pos++]);
          }
        }
        if (pos < n && text[pos] != ',' && text[pos] != '\n' && text[pos] != '\r')
          throw ParseError("text after closing quote", pos);
      } else {
        while (pos < n && text[pos] != ',' && text[pos] != '\n' && text[pos] != '\r')
          field.push_back(text[pos++]);
      }
      std::string_view tok(field);
      while (!tok.empty() && is_blank(tok.front())) tok.remove_prefix(1);
      while (!tok.empty() && is_blank(tok.back())) tok.remove_suffix(1);
      double x = 0.0;
      if (!parse_double(tok, x)) throw ParseError("bad numeric field", field_start);
      data.push_back(x);
      ++fields;
      if (pos < n && text[pos] == ',') {
        ++pos;
        continue;
      }
      break;
    }
    if (pos < n && text[pos] == '\r') {
      if (pos + 1 < n && text[pos + 1] == '\n') ++pos;
      else throw ParseError("bare carriage return", pos);
    }
    if (pos < n) ++pos;  // '\n'
    if (rows == 0) cols = fields;
    else if (fields != cols)
      throw ParseError("ragged row " + std::to_string(rows + 1) + ": " +
                           std::to_string(fields) + " fields, expected " +
                           std::to_string(cols),
                       row_start);
    ++rows;
  }
  if (rows == 0) throw ParseError("empty input", 0);
  return Matrix(rows, cols, std::move(data));
}

Matrix read_matrix(const std::filesystem::path& path) {
  return read_matrix(path, format_from_path(path));
}

Matrix read_matrix(const std::filesystem::path& path, MatrixFormat format) {
  const std::string text = read_file(path);
  return format == MatrixFormat::Csv ? parse_csv(text) : parse_matrix_market(text);
}

std::string format_matrix_market(const Matrix& m) {
  std::string out = "%%MatrixMarket matrix array real general\n";
  out += std::to_string(m.rows()) + " " + std::to_string(m.cols()) + "\n";
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (std::size_t i = 0; i < m.rows(); ++i) {
      out += format_double(m(i, j));
      out += '\n';
    }
  return out;
}

std::string format_csv(const Matrix& m) {
  std::string out;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

void write_matrix(const Matrix& m, const std::filesystem::path& path) {
  write_matrix(m, path, format_from_path(path));
}

void write_matrix(const Matrix& m, const std::filesystem::path& path, MatrixFormat format) {
  write_file_atomic(path, format == MatrixFormat::Csv ? format_csv(m)
                                                      : format_matrix_market(m));
}

}  // namespace cheblr
