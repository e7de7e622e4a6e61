#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tumatch {

// Dispatches the tumatch subcommands. `args` excludes the program name.
// Returns 0 on success, 2 on usage/config problems, 1 on runtime failures.
// Output goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tumatch
