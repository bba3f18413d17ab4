#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace invkit {

/// Base for failures while reading predicate or program text. `position` is a
/// byte offset into the input.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : std::runtime_error(message + " at offset " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class SyntaxError : public ParseError {
 public:
  using ParseError::ParseError;
};

/// Raised when an assignment, increment or decrement operator shows up in a
/// predicate.
class SideEffectError : public ParseError {
 public:
  using ParseError::ParseError;
};

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnboundVariable : public EvalError {
 public:
  explicit UnboundVariable(const std::string& name)
      : EvalError("unbound variable '" + name + "'"), name_(name) {}

  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class DivisionByZero : public EvalError {
 public:
  DivisionByZero() : EvalError("division by zero") {}
};

/// A schema violation in a JSONL input; `line` is 1-based.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace invkit
