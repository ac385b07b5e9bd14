#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sdpbound {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,         // usage or domain error
    kExitInput = 2,         // unreadable or malformed input file
    kExitStrictViolation = 3,
};

/// Entry point of the `sdpbound` tool: subcommands for, analyze, sweep, plotdata.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sdpbound
