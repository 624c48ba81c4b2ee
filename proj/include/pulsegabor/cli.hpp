#pragma once

#include <string>
#include <vector>

namespace pulsegabor {

// Exit codes: 0 success, 1 usage error, 2 data or config error.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);  // args[0] is the program name

}  // namespace pulsegabor
