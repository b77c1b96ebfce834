#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bfgp {

enum class ErrorKind {
  unsatisfiable_arity,
  missing_assignment,
  malformed_encoding,
  line_already_programmed,
  syntax_error,
  unknown_instruction,
  goal_not_partial_state,
  unknown_domain,
  unknown_program,
  unsupported_requirement,
  arity_overflow,
  invalid_argument,
  io_error,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Parse failure with a 1-based source position.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t line, std::size_t column, const std::string& message);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace bfgp
