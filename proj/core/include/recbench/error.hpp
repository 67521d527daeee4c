#pragma once

#include <stdexcept>
#include <string>

namespace recbench {

// Base for every failure the harness reports to a caller.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or CLI input; detected before any network call.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Unreadable or malformed input file. `line` is 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : Error(file + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
        file_(file),
        line_(line) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

// Endpoint rejected our credentials; the whole run set must stop.
class AuthError : public Error {
 public:
  using Error::Error;
};

}  // namespace recbench
