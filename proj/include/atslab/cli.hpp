#pragma once
#include <string>
#include <vector>

namespace ats {

// Entry point shared by the binary and the tests. Returns the process exit
// code: 0 success, 1 usage/validation error, 2 numerical failure.
int run(const std::vector<std::string>& args);

} // namespace ats
