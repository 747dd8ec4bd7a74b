#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace kmd {

/// Base exception for all library errors. Messages are stable strings that
/// the script runner copies into per-statement error entries.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a computation needs a place or field that lies outside the
/// supported fragment (non-rational residue field, inseparable factor, ...).
class Unsupported : public Error {
 public:
  explicit Unsupported(const std::string& what) : Error(what) {}
};

/// Syntax error with a 1-based column and the set of tokens that would have
/// been accepted there.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int column, std::vector<std::string> expected)
      : Error(what), column_(column), expected_(std::move(expected)) {}
  int column() const { return column_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  int column_;
  std::vector<std::string> expected_;
};

}  // namespace kmd
