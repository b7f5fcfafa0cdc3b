#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cqm::cli {

// Entry point behind the `cqm` binary. Parses args (without the program
// name), runs the selected subcommand, and reports errors as a single
// `E_<CODE>: message` line on `err`. Returns the process exit status:
// 0 on success, 2 on domain/file errors, CLI11's status on usage errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cqm::cli
