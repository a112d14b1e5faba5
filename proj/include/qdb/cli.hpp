#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qdb::cli {

enum ExitCode : int { ok = 0, failure = 1, incompatible = 2 };

/// Entry point of the `qdb` tool. `args` excludes the program name.
/// Machine-readable output goes to `out`, diagnostics to `err`.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace qdb::cli
