#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dynlf {

/// Full command-line entry point; `args` excludes the program name.
/// Returns 0 on success, 2 on usage errors, 1 on I/O or numerical failures.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dynlf
