#pragma once

#include <ostream>

namespace stratmeas {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitLimit = 2;
inline constexpr int kExitUsage = 64;

/// Runs one command: `argv[1]` is the command name, the rest are flags.
/// Reports go to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace stratmeas
