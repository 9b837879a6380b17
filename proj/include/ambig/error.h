#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ambig {

// Base class for every error raised by the toolchain.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  explicit ParseError(const std::string& what) : Error(what) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_ = 0;
};

// Inputs that fail a cross-file contract (line counts, alignment).
class AlignmentError : public Error {
 public:
  using Error::Error;
};

// Invalid or incomplete configuration, detected before any work is done.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ambig
