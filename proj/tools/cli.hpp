#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace riskdyn::cli {

/// Runs one invocation; `args` excludes the program name. Returns the exit
/// status: 0 on success, 1 on a runtime failure, 2 on a usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace riskdyn::cli
