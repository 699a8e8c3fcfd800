#pragma once

#include <ostream>
#include <span>
#include <string>

namespace ci_planner::cli {

enum ExitCode : int {
    kSuccess = 0,
    kUsageError = 1,
    kDomainError = 2,
};

/// Runs one `ci-planner` invocation. `args` excludes the program name.
/// Results go to `out`; errors and usage text go to `err`.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace ci_planner::cli
