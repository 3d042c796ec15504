#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lafusion {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad invocation: missing flag, out-of-range option.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Bad input data: malformed files, inconsistent models, invalid tokens.
class DataError : public Error {
 public:
  using Error::Error;
};

class ParseError : public DataError {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : DataError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace lafusion
