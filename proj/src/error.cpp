#include "bfgp/error.hpp"

namespace bfgp {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::unsatisfiable_arity: return "UnsatisfiableArity";
    case ErrorKind::missing_assignment: return "MissingAssignment";
    case ErrorKind::malformed_encoding: return "MalformedEncoding";
    case ErrorKind::line_already_programmed: return "LineAlreadyProgrammed";
    case ErrorKind::syntax_error: return "SyntaxError";
    case ErrorKind::unknown_instruction: return "UnknownInstruction";
    case ErrorKind::goal_not_partial_state: return "GoalNotPartialState";
    case ErrorKind::unknown_domain: return "UnknownDomain";
    case ErrorKind::unknown_program: return "UnknownProgram";
    case ErrorKind::unsupported_requirement: return "UnsupportedRequirement";
    case ErrorKind::arity_overflow: return "ArityOverflow";
    case ErrorKind::invalid_argument: return "InvalidArgument";
    case ErrorKind::io_error: return "IoError";
  }
  return "Error";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

SyntaxError::SyntaxError(std::size_t line, std::size_t column, const std::string& message)
    : Error(ErrorKind::syntax_error,
            std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

}  // namespace bfgp
