#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace scad::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
    kOk = 0,         ///< success; for solve/count: a feasible result
    kInfeasible = 1, ///< no schedule under the given objective/bounds, or deadlock
    kUsage = 2,      ///< bad flags, unreadable files, malformed inputs
    kInternal = 3,   ///< invariant breach (bug) or verification discrepancy
};

/// Runs the command line given as argv tail (no program name). All regular
/// output goes to `out`, diagnostics to `err`. Never throws; every failure is
/// turned into an exit code and a message.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace scad::cli
