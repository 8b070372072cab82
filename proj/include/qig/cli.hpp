#pragma once

// Command-line front end. `args` excludes the program name.

#include <ostream>
#include <string>
#include <vector>

namespace qig::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitInfinite = 3;

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qig::cli
