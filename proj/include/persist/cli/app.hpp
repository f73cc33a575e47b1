#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace persist::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 2,
    kExitData = 3,
    kExitDivergence = 4,
};

/// Entry point of the persist-sgd tool; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace persist::cli
