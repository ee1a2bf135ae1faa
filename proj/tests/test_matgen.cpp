#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "cheblr/matgen.hpp"
#include "cheblr/matrix_io.hpp"
#include "cheblr/rng.hpp"

using namespace cheblr;

namespace {

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("cheblr_test_gen_" + name);
}

}  // namespace

TEST_CASE("hilbert") {
  const Matrix h = hilbert(2);
  CHECK(h(0, 0) == 1.0 / 2.0);
  CHECK(h(0, 1) == 1.0 / 3.0);
  CHECK(h(1, 0) == 1.0 / 3.0);
  CHECK(h(1, 1) == 1.0 / 4.0);
  const Matrix h7 = hilbert(7);
  CHECK(h7(0, 0) == 0.5);
  CHECK(h7 == h7.transpose());
  CHECK_THROWS_AS(hilbert(1), InvalidArgument);
}

TEST_CASE("identity") {
  const Matrix i3 = identity(3);
  CHECK(i3 == Matrix{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
}

TEST_CASE("gaussian_kernel: unit diagonal, range, symmetry, determinism") {
  const Matrix k = gaussian_kernel(40, 5, 7);
  for (std::size_t i = 0; i < 40; ++i) {
    CHECK(k(i, i) == 1.0);
    for (std::size_t j = 0; j < 40; ++j) {
      CHECK(k(i, j) > std::exp(-4.0) * (1.0 - 1e-12));
      CHECK(k(i, j) <= 1.0);
      CHECK(k(i, j) == k(j, i));
    }
  }
  CHECK(gaussian_kernel(40, 5, 7) == k);
  CHECK_FALSE(gaussian_kernel(40, 5, 8) == k);
  CHECK_THROWS_AS(gaussian_kernel(5, 0, 1), InvalidArgument);
}

TEST_CASE("gaussian_kernel in one dimension has entries 1 or exp(-4)") {
  const Matrix k = gaussian_kernel(6, 1, 3);
  for (double x : k.data())
    CHECK((x == 1.0 || x == doctest::Approx(std::exp(-4.0)).epsilon(1e-15)));
}

TEST_CASE("parse_pgm: tiny binary and ASCII images") {
  CHECK(parse_pgm(std::string("P5 1 1 200\n") + static_cast<char>(200)) == Matrix{{1.0}});
  const std::string bin = std::string("P5\n# comment\n2 2\n255\n") + '\0' + '\xff' + '\xff' + '\0';
  CHECK(parse_pgm(bin) == Matrix{{0.0, 1.0}, {1.0, 0.0}});
  CHECK(parse_pgm("P2\n2 2\n# c\n7\n0 7\n7 0\n") == Matrix{{0.0, 1.0}, {1.0, 0.0}});
  CHECK(parse_pgm("P2 3 1 4 0 2 4") == Matrix{{0.0, 0.5, 1.0}});
}

TEST_CASE("parse_pgm: 16-bit samples are big-endian") {
  const std::string bin = std::string("P5 2 1 65535\n") + '\x80' + '\x00' + '\xff' + '\xff';
  const Matrix m = parse_pgm(bin);
  CHECK(m(0, 0) == doctest::Approx(32768.0 / 65535.0));
  CHECK(m(0, 1) == 1.0);
}

TEST_CASE("parse_pgm: malformed input reports an offset") {
  CHECK_THROWS_AS(parse_pgm(""), ParseError);
  CHECK_THROWS_AS(parse_pgm("P6 1 1 255\n\x01\x02\x03"), ParseError);
  CHECK_THROWS_AS(parse_pgm("P5 2 2 255\n\x01"), ParseError);
  CHECK_THROWS_AS(parse_pgm("P2 2 1 5 1 9"), ParseError);
  CHECK_THROWS_AS(parse_pgm("P2 0 1 5"), ParseError);
  try {
    (void)parse_pgm("P5 x");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 3);
  }
}

TEST_CASE("write_pgm then load_image_pgm round-trips 8-bit images") {
  Rng rng(21);
  std::uniform_int_distribution<int> pix(0, 255);
  Matrix m(9, 13);
  for (double& x : m.data()) x = pix(rng) / 255.0;
  const auto path = temp_path("round.pgm");
  write_pgm(m, path);
  const Matrix back = load_image_pgm(path);
  REQUIRE(back.rows() == 9);
  REQUIRE(back.cols() == 13);
  CHECK((back - m).max_abs() <= 1e-15);
  std::filesystem::remove(path);
}

TEST_CASE("MatrixMarket and CSV round-trips are bit-exact") {
  Rng rng(22);
  const Matrix m = gaussian_matrix(5, 4, rng);
  for (const char* name : {"rt.mtx", "rt.csv"}) {
    const auto path = temp_path(name);
    write_matrix(m, path);
    CHECK(read_matrix(path) == m);
    std::filesystem::remove(path);
  }
  const Matrix h = hilbert(4);
  CHECK(parse_matrix_market(format_matrix_market(h)) == h);
  CHECK(parse_csv(format_csv(h)) == h);
}

TEST_CASE("MatrixMarket layout is column-major") {
  const Matrix m = parse_matrix_market(
      "%%MatrixMarket matrix array real general\n% note\n2 3\n1\n2\n3\n4\n5\n6\n");
  CHECK(m == Matrix{{1, 3, 5}, {2, 4, 6}});
}

TEST_CASE("matrix parsers reject bad input") {
  CHECK_THROWS_AS(parse_matrix_market(""), ParseError);
  CHECK_THROWS_AS(parse_csv(""), ParseError);
  CHECK_THROWS_AS(parse_csv("1,2\n3\n"), ParseError);
  CHECK_THROWS_AS(parse_csv("1,x\n"), ParseError);
  CHECK_THROWS_AS(parse_csv("1,nan\n"), ParseError);
  CHECK_THROWS_AS(parse_matrix_market("%%MatrixMarket matrix coordinate real general\n1 1 1\n1 1 1\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_matrix_market("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n"),
                  ParseError);
  CHECK_THROWS_AS(read_matrix("/nonexistent/file.mtx"), IoError);
  const auto path = temp_path("empty.mtx");
  write_file_atomic(path, "");
  CHECK_THROWS_AS(read_matrix(path), ParseError);
  std::filesystem::remove(path);
}

TEST_CASE("parse_csv accepts quoted fields and CRLF") {
  CHECK(parse_csv("\"1.5\",2\r\n3,\" 4 \"\r\n") == Matrix{{1.5, 2.0}, {3.0, 4.0}});
  CHECK(parse_csv("1,2") == Matrix{{1.0, 2.0}});
}

TEST_CASE("GeneratorSpec parse and round-trip") {
  const auto k = GeneratorSpec::parse("kernel:16:3:9");
  CHECK(k.kind == GeneratorSpec::Kind::Kernel);
  CHECK(k.n == 16);
  CHECK(k.dim == 3);
  CHECK(k.seed == 9);
  CHECK(k.to_string() == "kernel:16:3:9");
  CHECK(k.generate() == gaussian_kernel(16, 3, 9));
  CHECK(GeneratorSpec::parse("hilbert:5").generate() == hilbert(5));
  CHECK(GeneratorSpec::parse("identity:4").generate() == identity(4));
  CHECK(GeneratorSpec::parse("image:/tmp/x.pgm").path == "/tmp/x.pgm");
  CHECK_THROWS_AS(GeneratorSpec::parse("hilbert"), InvalidArgument);
  CHECK_THROWS_AS(GeneratorSpec::parse("hilbert:1"), InvalidArgument);
  CHECK_THROWS_AS(GeneratorSpec::parse("kernel:4:2"), InvalidArgument);
  CHECK_THROWS_AS(GeneratorSpec::parse("magic:4"), InvalidArgument);
  CHECK_THROWS_AS(GeneratorSpec::parse("identity:4x"), InvalidArgument);
}
