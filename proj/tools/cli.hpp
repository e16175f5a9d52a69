#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sensorfault::cli {

/// Runs one command line (args[0] is the program name) and returns the exit
/// code: 0 success, 2 configuration error, 3 data error, 4 numeric failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sensorfault::cli
