#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace excitnet::cli {

/// Runs one command line (args[0] is the program name). Returns the exit status;
/// failures print a single "error: ..." line to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace excitnet::cli
