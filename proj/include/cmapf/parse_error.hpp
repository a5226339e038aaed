#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cmapf {

/// Malformed input, with the 1-based line it was detected on.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace cmapf
