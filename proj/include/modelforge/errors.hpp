#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace modelforge {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: bad schema, out-of-range element, wrong dimensions.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

class ParseError : public InvalidInput {
 public:
  ParseError(const std::string& what, std::size_t position)
      : InvalidInput(what + " at position " + std::to_string(position)), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

// Unknown symbol or arity mismatch between a formula and a vocabulary.
class VocabularyError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

// Evaluation was asked for a formula with an unbound free variable.
class EvaluationError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

// A documented precondition of an operation does not hold.
class PreconditionFailure : public Error {
 public:
  using Error::Error;
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace modelforge
