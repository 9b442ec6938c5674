#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace suitegauge::cli {

enum ExitCode : int { kSuccess = 0, kDataError = 1, kUsageError = 2 };

// Runs one subcommand (validate, compare-features, compare-performance,
// select, evaluate, report). `args` excludes the program name. Results go
// to the --out directory; progress text goes to `out`, diagnostics to `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace suitegauge::cli
