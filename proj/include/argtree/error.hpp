#ifndef ARGTREE_ERROR_HPP
#define ARGTREE_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace argtree {

// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on a tree or label was not met (unknown node, bad id).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed text input. `line` is 1-based; 0 when the error is not tied to a line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class UnsupportedVersion : public Error {
 public:
  using Error::Error;
};

// Training or decoding could not proceed with the given data.
class ModelError : public Error {
 public:
  using Error::Error;
};

}  // namespace argtree

#endif  // ARGTREE_ERROR_HPP
