#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bfgp::cli {

// Process exit statuses.
enum ExitCode : int {
  exit_ok = 0,
  exit_input_error = 1,
  exit_limit_reached = 2,  // synth: timeout or node limit
  exit_validation_failed = 3,
  exit_space_exhausted = 4,  // synth: every program of the given size was tried
};

// Runs one command; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int main(int argc, char** argv);

}  // namespace bfgp::cli
