#ifndef POLYVAR_CLI_HPP
#define POLYVAR_CLI_HPP

#include <string>
#include <vector>

namespace polyvar {

inline constexpr const char* kVersion = "0.1.0";

// Runs the command-line tool on the given arguments (program name
// excluded).  Returns the process exit code: 0 on success, 1 for usage
// or I/O problems, 2 when a mathematical assertion fails.
int run_cli(const std::vector<std::string>& args);

}  // namespace polyvar

#endif
