#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kelly::cli
{

/// Exit codes of the command-line tool.
enum ExitCode : int
{
    exit_ok = 0,
    exit_invalid = 2,
    exit_infeasible = 3,
    exit_io = 4
};

/// Runs one command. `args` excludes the program name. Reports go to `out`
/// (or to --out), diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace kelly::cli
