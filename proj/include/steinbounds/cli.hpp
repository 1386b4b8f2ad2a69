#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace steinbounds {

// Runs the command-line front end; returns the process exit code.
// stdout carries only the payload (JSON or CSV), stderr only diagnostics.
// Exit codes: 0 success, 1 verification unsatisfied, 2 inapplicable
// preconditions, 3 domain errors, 4 usage errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace steinbounds
