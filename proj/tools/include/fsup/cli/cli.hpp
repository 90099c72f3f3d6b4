#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fsup/gateway/config.hpp"

namespace fsup::cli {

/// Entry point of the `fsup` tool. `args` excludes the program name. Returns
/// the process exit code: 0 success, 1 runtime failure, 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const gateway::EnvLookup& env);

/// Same, with the process environment.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fsup::cli
