#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace demeasure {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed IR text. `line`/`column` are 1-based and zero when the
/// error is semantic rather than syntactic; `path` is a JSON pointer.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column, std::string path = {})
      : Error(what), line_(line), column_(column), path_(std::move(path)) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& path() const { return path_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string path_;
};

/// Shape or dimension mismatch between operands.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A value violates a mathematical precondition (unitarity, completeness...).
class InvariantError : public Error {
 public:
  using Error::Error;
};

class PassError : public Error {
 public:
  PassError(std::string pass, const std::string& what)
      : Error(pass + ": " + what), pass_(std::move(pass)) {}

  const std::string& pass() const { return pass_; }

 private:
  std::string pass_;
};

/// A configured resource cap (qubits, branches) would be exceeded.
class ResourceError : public Error {
 public:
  using Error::Error;
};

}  // namespace demeasure
