#pragma once

#include <string>
#include <vector>

namespace dht::tool {

inline constexpr const char* kVersion = "0.1.0";

// Full CLI entry point (args without the program name). Exit codes:
// 0 ok, 2 parse error, 3 infeasible parameters, 4 size guard.
int run_cli(const std::vector<std::string>& args);

}  // namespace dht::tool
