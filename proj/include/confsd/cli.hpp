#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace confsd {

/// Entry point behind the confsd executable. Subcommands: simulate,
/// calibrate, predict, evaluate, sweep, oracle-check.
/// Returns 0 on success, 1 on validation errors (bad flags, missing files,
/// malformed input), 2 on runtime errors or failed oracle checks.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace confsd
