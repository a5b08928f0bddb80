#pragma once

#include <istream>
#include <ostream>

namespace sqlsketch {

/// Entry point of the `sqlsketch` command: serve, run, bench or eval.
/// Returns the process exit code: 0 success, 1 bad input, 2 synthesis
/// failure, 3 timeout.
int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out,
            std::ostream& err);

}  // namespace sqlsketch
