#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace implicitreg::cli {

// Exit codes of the front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitNumerical = 2;

// Parses and runs one subcommand. Diagnostics go to `err`, summaries to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace implicitreg::cli
