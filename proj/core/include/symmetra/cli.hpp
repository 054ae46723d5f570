#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace symmetra {

// Parses and runs one CLI invocation (arguments without the program name).
// Commands: construct, mub, analyze, steer, table, export, verify.
// Returns 0 on success, 1 on a failed check, 2 on a usage or input error.
int commandDispatch(const std::vector<std::string>& args, std::ostream& out,
                    std::ostream& err);

}  // namespace symmetra
