// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace dfmap {

// Bad user input: malformed files, inconsistent shapes, missing layers.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Syntax error in one of the text formats. Line and column are 1-based; the
// file name is prefixed once the error reaches the loader that knows it.
class ParseError : public InputError {
 public:
  ParseError(const std::string& message, int line, int column, const std::string& file = {})
      : InputError((file.empty() ? "" : file + ":") + std::to_string(line) + ":" + std::to_string(column) + ": " +
                   message),
        message_(message),
        line_(line),
        column_(column) {}

  const std::string& message() const { return message_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  std::string message_;
  int line_;
  int column_;
};

// Failure while executing a schedule in the reference simulator.
class SimError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dfmap
