#pragma once

#include <iosfwd>

namespace betadim::cli {

// Exit statuses of the command-line front end.
enum Exit : int {
  kOk = 0,
  kUsage = 1,       // bad flags, bad values, internal failures
  kHypothesis = 2,  // hypothesis, precondition or domain violations
  kBudget = 3,      // enumeration budget exhausted
};

// Parses argv, runs one subcommand and writes its table to `out`;
// diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace betadim::cli
