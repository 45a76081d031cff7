#pragma once

#include <string>
#include <vector>

namespace holeburn::cli {

/// Runs one CLI invocation; argv[0] is the program name. Exit codes:
/// 0 success, 2 validation error, 3 fit non-convergence, 64 usage error.
int dispatch(const std::vector<std::string>& argv);

}  // namespace holeburn::cli
