#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace levyts {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2, kExitIo = 3 };

/// Runs the command line front end. args excludes the program name.
/// Exit codes: 0 success, 2 bad flags or config, 3 unreadable input or unwritable output,
/// 1 anything else.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace levyts
