#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace golf::cli {

// Exit codes
inline constexpr int kOk = 0;
inline constexpr int kUsage = 2;
inline constexpr int kFormat = 3;
inline constexpr int kValidation = 4;
inline constexpr int kParameter = 5;
inline constexpr int kInfeasible = 6;
inline constexpr int kRuntime = 7;

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace golf::cli
