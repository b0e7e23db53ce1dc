#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace epdata
{

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitUsage = 64;

/// Runs one subcommand. `args` excludes the program name.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace epdata
