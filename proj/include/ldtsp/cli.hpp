#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ldtsp {

/// Entry point behind the `ldtsp` binary. `args` excludes the program
/// name. Returns the process exit code:
///   0  success (optimal where a solve is involved)
///   1  I/O or internal failure
///   2  solver stopped at a limit with an incumbent
///   3  solver stopped with no incumbent
///   4  usage error
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

} // namespace ldtsp
