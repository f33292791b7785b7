#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wildwarn {

/// Bad or inconsistent input data. The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A row-level problem in a CSV stream; `row()` is the 1-based physical line.
class ParseError : public InputError {
 public:
  ParseError(std::size_t row, const std::string& what)
      : InputError("line " + std::to_string(row) + ": " + what), row_(row) {}

  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

/// A computation that is undefined for the given data (zero variance, too
/// few samples). The CLI maps this to exit code 1.
class ComputationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wildwarn
