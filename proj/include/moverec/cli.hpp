#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace moverec {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitInternal = 4;

// Runs the tool on `args` (without the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace moverec
