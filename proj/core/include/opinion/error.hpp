#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace opinion {

// Bad input data: malformed files, out-of-range values, degenerate sets.
// The CLI maps this family to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A DataError tied to a location in an input file.
class ParseError : public DataError {
 public:
  ParseError(std::string file, std::size_t line, const std::string& what)
      : DataError(format(file, line, what)), file_(std::move(file)), line_(line) {}

  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  static std::string format(const std::string& file, std::size_t line,
                            const std::string& what) {
    std::string out;
    if (!file.empty()) out += file + ": ";
    out += what + ", line " + std::to_string(line);
    return out;
  }

  std::string file_;
  std::size_t line_;
};

// Caller violated an operation's precondition (bad arguments, not bad data).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace opinion
