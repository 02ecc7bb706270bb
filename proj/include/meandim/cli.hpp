#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace meandim {

inline constexpr const char* kVersion = "0.1.0";

// args excludes the program name. Exit codes: 0 ok, 1 usage error, 2 verification failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace meandim
