#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace encounterlens {

/// Process exit codes of the command-line tool.
namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int failure = 1;
inline constexpr int missing_input = 2;
inline constexpr int schema_mismatch = 3;
}  // namespace exit_code

/// Runs the tool; `args` excludes the program name. Summaries go to `out`,
/// warnings and diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace encounterlens
