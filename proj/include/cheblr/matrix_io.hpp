#pragma once

#include <filesystem>
#include <string>

#include "cheblr/matrix.hpp"

namespace cheblr {

enum class MatrixFormat { MatrixMarket, Csv };

/// ".csv" selects CSV, anything else MatrixMarket.
MatrixFormat format_from_path(const std::filesystem::path& path);

/// MatrixMarket "array real general" (column-major values) or RFC-4180 CSV
/// with one matrix row per record. Throws ParseError or IoError.
Matrix read_matrix(const std::filesystem::path& path);
Matrix read_matrix(const std::filesystem::path& path, MatrixFormat format);
Matrix parse_matrix_market(const std::string& text);
Matrix parse_csv(const std::string& text);

/// 17 significant digits, so a write/read round trip is bit exact. The file
/// is written to a temporary sibling and renamed into place.
void write_matrix(const Matrix& m, const std::filesystem::path& path);
void write_matrix(const Matrix& m, const std::filesystem::path& path, MatrixFormat format);
std::string format_matrix_market(const Matrix& m);
std::string format_csv(const Matrix& m);

/// Whole-file helpers shared with the CLI. Throw IoError.
std::string read_file(const std::filesystem::path& path);
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace cheblr
