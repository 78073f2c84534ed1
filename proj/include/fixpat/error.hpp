#pragma once

#include <stdexcept>
#include <string>

namespace fixpat {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input (JSON documents, source files, bug reports).
struct ParseError : Error {
  explicit ParseError(const std::string& msg, long offset = -1)
      : Error(msg), byte_offset(offset) {}
  ParseError(const std::string& msg, int line, int column)
      : Error(msg), line(line), column(column) {}
  long byte_offset = -1;
  int line = -1;
  int column = -1;
};

// Violated structural invariants (inconsistent hole indices, bad refs).
struct InvariantError : Error {
  using Error::Error;
};

// Bad command-line usage or malformed corpus layout.
struct UsageError : Error {
  using Error::Error;
};

// Printing or patch splicing failed (unknown label, missing span).
struct RenderError : Error {
  using Error::Error;
};

}  // namespace fixpat
