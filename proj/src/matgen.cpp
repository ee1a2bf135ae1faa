#include "cheblr/matgen.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <vector>

#include "cheblr/errors.hpp"
#include "cheblr/matrix_io.hpp"
#include "cheblr/rng.hpp"

namespace cheblr {
namespace {

constexpr int kPointRedraws = 16;
constexpr double kMinPointNorm = 1e-12;

void require_size(std::size_t n) {
  if (n < 2) throw InvalidArgument("matrix size must be at least 2");
}

class PgmReader {
 public:
  explicit PgmReader(const std::string& s) : s_(s) {}

  void skip_space_and_comments() {
    while (pos_ < s_.size()) {
      const unsigned char c = static_cast<unsigned char>(s_[pos_]);
      if (std::isspace(c)) {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n' && s_[pos_] != '\r') ++pos_;
      } else {
        break;
      }
    }
  }

  unsigned long number(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    unsigned long v = 0;
    const char* first = s_.data() + pos_;
    const char* last = s_.data() + s_.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr == first)
      throw ParseError(std::string("expected ") + what, start);
    pos_ += static_cast<std::size_t>(ptr - first);
    return v;
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t k) { pos_ += k; }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

Matrix hilbert(std::size_t n) {
  require_size(n);
  Matrix h(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) h(i, j) = 1.0 / static_cast<double>(i + j + 2);
  return h;
}

Matrix identity(std::size_t n) {
  require_size(n);
  return Matrix::identity(n);
}

Matrix gaussian_kernel(std::size_t n, std::size_t dim, std::uint64_t seed) {
  require_size(n);
  if (dim < 1) throw InvalidArgument("sphere dimension must be at least 1");
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix x(n, dim);
  for (std::size_t i = 0; i < n; ++i) {
    auto xi = x.row(i);
    double norm = 0.0;
    for (int attempt = 0;; ++attempt) {
      if (attempt == kPointRedraws)
        throw DegeneratePoint("point " + std::to_string(i) + " has a vanishing norm after " +
                              std::to_string(kPointRedraws) + " draws");
      for (double& c : xi) c = normal(rng);
      norm = norm2(xi);
      if (norm >= kMinPointNorm) break;
    }
    for (double& c : xi) c /= norm;
  }

  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    a(i, i) = 1.0;
    auto xi = x.row(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      auto xj = x.row(j);
      double d2 = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double t = xi[k] - xj[k];
        d2 += t * t;
      }
      a(i, j) = a(j, i) = std::exp(-d2);
    }
  }
  return a;
}

Matrix parse_pgm(const std::string& bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '2'))
    throw ParseError("missing P5/P2 magic number", 0);
  const bool binary = bytes[1] == '5';
  PgmReader rd(bytes);
  rd.advance(2);
  const unsigned long width = rd.number("width");
  const unsigned long height = rd.number("height");
  const std::size_t maxval_at = rd.pos();
  const unsigned long maxval = rd.number("maxval");
  if (width == 0 || height == 0) throw ParseError("image has a zero dimension", maxval_at);
  if (maxval == 0 || maxval > 65535) throw ParseError("maxval out of range", maxval_at);

  const std::size_t count = static_cast<std::size_t>(width) * height;
  std::vector<double> data(count);
  const double scale = static_cast<double>(maxval);
  if (binary) {
    const std::size_t at = rd.pos();
    if (at >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[at])))
      throw ParseError("expected whitespace before pixel data", at);
    rd.advance(1);
    const std::size_t bpp = maxval > 255 ? 2 : 1;
    const std::size_t start = rd.pos();
    if (bytes.size() - start < count * bpp)
      throw ParseError("pixel data truncated", bytes.size());
    for (std::size_t k = 0; k < count; ++k) {
      const std::size_t o = start + k * bpp;
      unsigned long v = static_cast<unsigned char>(bytes[o]);
      if (bpp == 2) v = (v << 8) | static_cast<unsigned char>(bytes[o + 1]);
      if (v > maxval) throw ParseError("sample exceeds maxval", o);
      data[k] = static_cast<double>(v) / scale;
    }
  } else {
    for (std::size_t k = 0; k < count; ++k) {
      rd.skip_space_and_comments();
      const std::size_t at = rd.pos();
      const unsigned long v = rd.number("pixel value");
      if (v > maxval) throw ParseError("sample exceeds maxval", at);
      data[k] = static_cast<double>(v) / scale;
    }
  }
  return Matrix(height, width, std::move(data));
}

Matrix load_image_pgm(const std::filesystem::path& path) { return parse_pgm(read_file(path)); }

void write_pgm(const Matrix& m, const std::filesystem::path& path) {
  std::string out = "P5\n" + std::to_string(m.cols()) + " " + std::to_string(m.rows()) + "\n255\n";
  out.reserve(out.size() + m.data().size());
  for (double x : m.data()) {
    const double c = std::clamp(x, 0.0, 1.0);
    out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(c * 255.0))));
  }
  write_file_atomic(path, out);
}

GeneratorSpec GeneratorSpec::parse(const std::string& text) {
  const std::size_t colon = text.find(':');
  if (colon == std::string::npos)
    throw InvalidArgument("generator descriptor needs a ':' (got '" + text + "')");
  const std::string kind = text.substr(0, colon);
  const std::string rest = text.substr(colon + 1);
  GeneratorSpec spec;
  if (kind == "image") {
    if (rest.empty()) throw InvalidArgument("image descriptor needs a path");
    spec.kind = Kind::Image;
    spec.path = rest;
    return spec;
  }

  std::vector<std::uint64_t> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t end = rest.find(':', start);
    const std::string tok = rest.substr(start, end == std::string::npos ? end : end - start);
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size())
      throw InvalidArgument("bad number '" + tok + "' in descriptor '" + text + "'");
    fields.push_back(v);
    if (end == std::string::npos) break;
    start = end + 1;
  }

  if (kind == "hilbert" || kind == "identity") {
    if (fields.size() != 1) throw InvalidArgument(kind + " descriptor takes one size");
    spec.kind = kind == "hilbert" ? Kind::Hilbert : Kind::Identity;
  } else if (kind == "kernel") {
    if (fields.size() != 3) throw InvalidArgument("kernel descriptor is kernel:N:DIM:SEED");
    spec.kind = Kind::Kernel;
    spec.dim = static_cast<std::size_t>(fields[1]);
    spec.seed = fields[2];
    if (spec.dim < 1) throw InvalidArgument("kernel dimension must be at least 1");
  } else {
    throw InvalidArgument("unknown generator '" + kind + "'");
  }
  spec.n = static_cast<std::size_t>(fields[0]);
  require_size(spec.n);
  return spec;
}

std::string GeneratorSpec::to_string() const {
  switch (kind) {
    case Kind::Hilbert: return "hilbert:" + std::to_string(n);
    case Kind::Identity: return "identity:" + std::to_string(n);
    case Kind::Kernel:
      return "kernel:" + std::to_string(n) + ":" + std::to_string(dim) + ":" +
             std::to_string(seed);
    case Kind::Image: return "image:" + path;
  }
  return {};
}

Matrix GeneratorSpec::generate() const {
  switch (kind) {
    case Kind::Hilbert: return hilbert(n);
    case Kind::Identity: return identity(n);
    case Kind::Kernel: return gaussian_kernel(n, dim, seed);
    case Kind::Image: return load_image_pgm(path);
  }
  throw InvalidArgument("unknown generator kind");
}

}  // namespace cheblr
