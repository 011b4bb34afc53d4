#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hcmap::cli {

/// Runs the hcmapper command line. Exit codes: 0 success, 1 load or
/// validation failure, 2 usage error. Errors are written to `err` as a single
/// line prefixed "hcmapper: error:".
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hcmap::cli
