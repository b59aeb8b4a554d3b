#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bfpack::cli {

/// Runs one `bfpack` invocation. `args` excludes the program name. Returns
/// the process exit status: 0 success, 2 config, 3 parse, 4 capacity, 1 other.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace bfpack::cli
