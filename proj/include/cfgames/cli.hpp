#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cfgames {

/// Runs the command line front end. `args` excludes the program name.
/// Exit codes: 0 ok, 1 runtime failure, 2 usage or input error, 3 internal invariant.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

} // namespace cfgames
