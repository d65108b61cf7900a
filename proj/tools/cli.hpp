#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace wcells::cli {

// Exit codes: 0 success or pass, 2 verification counterexample (report still written),
// 1 usage, configuration or computation error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitCounterexample = 2;

// Environment variable overriding the KL cache directory.
inline constexpr const char* kCacheDirEnv = "WCELLS_CACHE_DIR";

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wcells::cli
