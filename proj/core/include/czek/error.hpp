#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace czek {

/// Broad failure classes; the CLI maps them onto exit codes.
enum class ErrorKind {
  usage,    // bad flags or option values
  data,     // malformed or inconsistent input data
  runtime,  // everything else (I/O, limits exceeded)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

class RuntimeError : public Error {
 public:
  explicit RuntimeError(const std::string& what)
      : Error(ErrorKind::runtime, what) {}
};

/// Parse failure with 1-based line and column (column 0 when the whole line is
/// at fault).
class ParseError : public DataError {
 public:
  ParseError(std::string source, std::size_t line, std::size_t column,
             const std::string& message);

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::string source_;
  std::size_t line_;
  std::size_t column_;
};

}  // namespace czek
