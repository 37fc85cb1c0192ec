#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gravwit::cli {

enum ExitCode : int {
    ok = 0,
    io_error = 1,
    usage = 2,
    numerical = 3,
    falsification_failed = 4,
};

/// Runs one command line (without the program name). Subcommands:
/// witness, sweep, evolve, falsify, selftest.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gravwit::cli
