#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bimodal::cli {

/// Runs one invocation. `args` excludes the program name. Returns 0 on
/// success, 1 on a domain error (JSON report on `err`), 2 on a usage or
/// malformed-input error.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace bimodal::cli
