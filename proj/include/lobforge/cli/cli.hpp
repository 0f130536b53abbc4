#pragma once

#include <string>
#include <vector>

namespace lobforge::cli {

// Entry point shared by the binary and the tests. Returns the process exit
// code (0 on success; distinct nonzero codes per error class).
int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

}  // namespace lobforge::cli
