#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dslforge::api {

/// The dslforge command line. `args` excludes the program name. Prints JSON
/// results to `out` and diagnostics to `err`; returns 0 on success, 1 on a
/// domain error, 2 on a usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dslforge::api
