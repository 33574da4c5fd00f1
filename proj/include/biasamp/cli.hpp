#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace biasamp::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kConfigError = 2,
    kDataError = 3,
    kNumericError = 4,
};

/// Entry point for `biasamp <subcommand> ...`; args exclude the program name.
/// Subcommands: simulate, collapse, project, analyze, aggregate.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace biasamp::cli
