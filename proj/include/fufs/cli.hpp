#pragma once

#include <ostream>

namespace fufs {

// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;  // table1 row outside tolerance, unexpected error
inline constexpr int kExitUsage = 2;
inline constexpr int kExitDomain = 3;
inline constexpr int kExitConvergence = 4;

/// Subcommands: compute, fasta, sweep, bench, table1. Run with --help for options.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fufs
