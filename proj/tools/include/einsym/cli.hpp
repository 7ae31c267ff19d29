#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace einsym::cli {

enum Exit : int { kOk = 0, kCheckFailed = 1, kUsage = 2 };

// Runs one command line (args exclude the program name). Artifacts go to
// --out when given, otherwise to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace einsym::cli
