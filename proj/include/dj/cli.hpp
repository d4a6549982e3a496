#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dj::cli {

/// Entry point behind the `djengine` executable. `args` excludes the program
/// name. Returns 0 on success, 1 for script errors and 2 for usage errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::istream& in);

}  // namespace dj::cli
