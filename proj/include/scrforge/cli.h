#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace scrforge {

// Runs one subcommand: render | histmatch | solve | align | eval | e2e-toy.
// Returns 0 on success, 1 on domain errors and 2 on usage errors; usage
// errors print the synopsis to `err`. args[0] is the program name.
int RunCommand(const std::vector<std::string>& args, std::ostream& out,
               std::ostream& err);

}  // namespace scrforge
