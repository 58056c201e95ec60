#pragma once

#include <string>
#include <vector>

namespace wwmon::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Exit codes: 0 ok, 1 usage error, 2 data or numeric error.
int run_command(int argc, char** argv);
/// Same, without the program name: args[0] is the subcommand.
int run_command(const std::vector<std::string>& args);

}  // namespace wwmon::cli
