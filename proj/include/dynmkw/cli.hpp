#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dynmkw::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// Entry point shared by the executable and the tests. args excludes the
// program name, e.g. {"segment", "--input", "x.csv", "--k", "2"}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dynmkw::cli
