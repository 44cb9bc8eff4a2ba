#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace blackout {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (case files, sample files). Carries the location.
class ParseError : public Error {
 public:
  ParseError(std::string block, std::size_t row, std::size_t column, const std::string& what)
      : Error(block + " row " + std::to_string(row) + ", column " + std::to_string(column) + ": " + what),
        block_(std::move(block)),
        row_(row),
        column_(column) {}

  const std::string& block() const noexcept { return block_; }
  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::string block_;
  std::size_t row_;
  std::size_t column_;
};

/// A JSON document does not follow the expected schema.
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Domain invariants do not hold (bad network, bad strategy, bad config).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// The request is well formed but too large to honour (combinatorial caps).
class RefusalError : public Error {
 public:
  RefusalError(const std::string& what, std::uint64_t count) : Error(what), count_(count) {}

  std::uint64_t count() const noexcept { return count_; }

 private:
  std::uint64_t count_;
};

/// Numerical failure that should be impossible for valid inputs.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace blackout
