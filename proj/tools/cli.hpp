#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace curvedray::cli {

enum ExitCode : int {
    kOk = 0,
    kInternal = 1,
    kUsage = 2,
    kMissingFile = 3,
    kFormat = 4,
    kVersion = 5,
    kModule = 6,
};

/// Run one subcommand. `args` excludes the program name. Diagnostics go to
/// `err`, summaries (and --dump-json documents) to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace curvedray::cli
