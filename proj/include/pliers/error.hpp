#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pliers {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Structural problems with graph input or graph surgery.
class GraphError : public Error {
 public:
  using Error::Error;
};

/// Invalid parameters, unknown algorithm names, bad experiment configs.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Unparseable input text. `line()` is 1-based; 0 when not line-oriented.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace pliers
