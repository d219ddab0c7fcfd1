#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace outlier {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. Carries the 1-based line number of the offending record.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& message)
      : Error(source + ":" + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// A referenced entity (utterance, class, seed) does not exist.
class NotFoundError : public Error {
 public:
  using Error::Error;
};

/// The operation is not allowed in the current state, e.g. a verdict on an
/// utterance that was never flagged or closing a round with pending reviews.
class StateError : public Error {
 public:
  using Error::Error;
};

}  // namespace outlier
