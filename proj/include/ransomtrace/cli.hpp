#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ransomtrace::cli {

// Runs one subcommand. `args` excludes the program name. Returns 0 on
// success, 1 on runtime errors (one `error kind=... message="..."` line on
// `err`), 2 on usage errors (message plus usage text on `err`).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// `error kind=<kind> message="<escaped>"`
std::string error_line(const std::string& kind, const std::string& message);

} // namespace ransomtrace::cli
