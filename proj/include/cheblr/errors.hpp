#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cheblr {

enum class ErrorCode {
  SingularSubmatrix,
  DegenerateComplement,
  IterationLimit,
  SizeLimit,
  NonChebyshevIterate,
  LineSolveFailure,
  AllRestartsFailed,
  ConvergenceFailure,
  DegeneratePoint,
  ParseError,
  IoError,
  InvalidArgument,
};

const char* to_string(ErrorCode code);

/// Base of every error raised by the library. `code()` identifies the failure
/// class so callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

#define CHEBLR_DEFINE_ERROR(Name)                          \
  class Name : public Error {                              \
   public:                                                 \
    explicit Name(const std::string& what)                 \
        : Error(ErrorCode::Name, #Name ": " + what) {}     \
  };

// The working (r+1)xr submatrix is numerically rank deficient.
CHEBLR_DEFINE_ERROR(SingularSubmatrix)
// A null vector of the working submatrix has a (numerically) zero entry.
CHEBLR_DEFINE_ERROR(DegenerateComplement)
CHEBLR_DEFINE_ERROR(IterationLimit)
CHEBLR_DEFINE_ERROR(SizeLimit)
CHEBLR_DEFINE_ERROR(NonChebyshevIterate)
CHEBLR_DEFINE_ERROR(AllRestartsFailed)
CHEBLR_DEFINE_ERROR(ConvergenceFailure)
CHEBLR_DEFINE_ERROR(DegeneratePoint)
CHEBLR_DEFINE_ERROR(IoError)
CHEBLR_DEFINE_ERROR(InvalidArgument)

#undef CHEBLR_DEFINE_ERROR

/// Parse failure; `offset()` is the byte offset (or line number for
/// line-oriented formats, see `what()`) where parsing stopped.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(ErrorCode::ParseError,
              "ParseError at offset " + std::to_string(offset) + ": " + what),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// A row (or column) solve inside phi/psi failed. Carries the offending line
/// index and the code of the underlying kernel error.
class LineSolveFailure : public Error {
 public:
  LineSolveFailure(std::size_t line, ErrorCode cause, const std::string& what)
      : Error(ErrorCode::LineSolveFailure,
              "line " + std::to_string(line) + ": " + what),
        line_(line),
        cause_(cause) {}
  std::size_t line() const noexcept { return line_; }
  ErrorCode cause() const noexcept { return cause_; }

 private:
  std::size_t line_;
  ErrorCode cause_;
};

}  // namespace cheblr
