#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace texeval {

/// Entry point of the `texeval` command line tool. `args` excludes the program
/// name. Returns the process exit code: 0 success, 1 runtime failure, 2 usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace texeval
