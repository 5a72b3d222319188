#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace scsnet::cli {

/// Runs one command; `args` excludes the program name. Returns the process
/// exit code: 0 success, 1 internal error, 2 usage or configuration error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace scsnet::cli
