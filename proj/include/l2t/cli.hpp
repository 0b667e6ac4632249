#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "l2t/error.hpp"

namespace l2t::cli {

enum ExitCode : int { kOk = 0, kFailed = 1, kInvalid = 2, kUncertified = 3 };

ExitCode exit_code(ErrorKind kind);

// Runs one `l2torsion` invocation. `args` excludes the program name; "-" as a file
// argument reads `in`. Reports go to `out`, diagnostics to `err`.
int execute(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace l2t::cli
