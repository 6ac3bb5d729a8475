#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tablefill {

/// Entry point of the `tablefill` tool. args[0] is the program name.
/// Returns the process exit status; `serve` blocks until SIGINT or SIGTERM.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tablefill
