#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include "cheblr/matrix.hpp"

namespace cheblr {

/// h_ij = 1 / (i + j) with 1-based i, j.
Matrix hilbert(std::size_t n);

Matrix identity(std::size_t n);

/// a_ij = exp(-||x_i - x_j||^2) for n points drawn uniformly on the unit
/// sphere in R^dim (normalized Gaussian vectors, seeded). Symmetric with an
/// exactly unit diagonal. Throws DegeneratePoint if a draw keeps vanishing.
Matrix gaussian_kernel(std::size_t n, std::size_t dim, std::uint64_t seed);

/// Grayscale PGM (P5 or P2), scaled by maxval into [0, 1]. Throws ParseError
/// with the byte offset of the offending token, IoError if unreadable.
Matrix load_image_pgm(const std::filesystem::path& path);
Matrix parse_pgm(const std::string& bytes);

/// Writes entries (clamped to [0, 1]) as 8-bit binary PGM.
void write_pgm(const Matrix& m, const std::filesystem::path& path);

/// Generator descriptor as accepted by the CLI: "hilbert:N", "identity:N",
/// "kernel:N:DIM:SEED" or "image:PATH".
struct GeneratorSpec {
  enum class Kind { Hilbert, Identity, Kernel, Image };
  Kind kind = Kind::Hilbert;
  std::size_t n = 0;
  std::size_t dim = 0;
  std::uint64_t seed = 0;
  std::string path;

  /// Throws InvalidArgument on a malformed descriptor or n < 2.
  static GeneratorSpec parse(const std::string& text);
  std::string to_string() const;
  Matrix generate() const;
};

}  // namespace cheblr
