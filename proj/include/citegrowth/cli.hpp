#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace citegrowth::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kInput = 2, kInternal = 3 };

/// Runs one subcommand (`args` excludes the program name). Diagnostics go to
/// `err`, short progress notes to `out`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace citegrowth::cli
