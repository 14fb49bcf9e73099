#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace focklab {

enum class ErrorKind {
  InvalidInput,
  NoEnvelope,
  DivergentNorm,
  MethodUnavailable,
  UnsupportedFunctional,
  OptimizationFailure,
  Parse,
  Io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// A parse failure carrying the 0-based offset into the input text.
class ParseError : public Error {
 public:
  ParseError(std::size_t position, const std::string& message)
      : Error(ErrorKind::Parse,
              "at position " + std::to_string(position) + ": " + message),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace focklab
