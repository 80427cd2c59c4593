#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace snowball::cli {

/// Runs the `snowball` command line. Returns the process exit code:
/// 0 success, 2 configuration error, 3 data error, 1 anything else.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Convenience overload; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace snowball::cli
