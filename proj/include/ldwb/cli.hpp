#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ldwb::cli {

// Runs one workbench invocation. `args` excludes the program name.
// Returns 0 on success, 1 on data errors, 2 on usage errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ldwb::cli
