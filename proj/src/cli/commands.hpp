#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace heavy::cli {

// Environment variable holding the default approximate-mode tolerance.
inline constexpr const char* tolerance_env = "HEAVY_TOLERANCE";

// Runs one subcommand. args excludes the program name. Returns 0 on success,
// 1 when a certificate or sweep fails, 2 on bad input.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace heavy::cli
